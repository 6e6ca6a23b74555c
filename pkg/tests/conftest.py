import json
import os
from fractions import Fraction

import pytest

from nlsplus.main import parse_and_dispatch


def pytest_collection_modifyitems(config, items):
    if os.getenv("NLS_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="cálculo largo; usar NLS_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# c(1,1) hasta la capa 5: {n: {j: c_{n,j}}}
EXAMPLE_SHELLS = {
    1: {1: Fraction(1)},
    2: {2: Fraction(1, 2), 4: Fraction(-1, 2)},
    3: {3: Fraction(1, 6), 5: Fraction(-1, 4), 9: Fraction(1, 12)},
    4: {4: Fraction(7, 144), 6: Fraction(-1, 10), 8: Fraction(1, 32), 10: Fraction(1, 36),
        16: Fraction(-11, 1440)},
    5: {5: Fraction(19, 1440), 7: Fraction(-37, 1080), 9: Fraction(5, 256), 11: Fraction(5, 504),
        13: Fraction(-1, 144), 17: Fraction(-11, 5760), 25: Fraction(113, 241920)},
}


@pytest.fixture
def example_shells():
    return EXAMPLE_SHELLS


@pytest.fixture
def run_cli(capsys):
    """Ejecuta la CLI y devuelve (código, stdout)"""
    def run(*argv):
        code = parse_and_dispatch([str(a) for a in argv])
        out = capsys.readouterr().out
        return code, out
    return run


@pytest.fixture
def read_json():
    def read(path):
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return read
