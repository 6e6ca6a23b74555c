import random
from fractions import Fraction

import numpy as np
import pytest

from nlsplus.core import lattice
from nlsplus.core.intervals import Interval
from nlsplus.core.scalars import QComplex, get_field
from nlsplus.core.sequences import (
    ModeSequence,
    ShellArrays,
    SpaceTimeSequence,
    mode_power,
    mode_product,
    st_power,
    st_product,
)
from nlsplus.guards import DomainError


def _random_modes(rng, d, s):
    entries = {}
    for _ in range(rng.randint(1, 4)):
        n = tuple(rng.randint(0, 4) for _ in range(d))
        entries[n] = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
    return ModeSequence(d, entries, s=s, field="rational")


def _random_spacetime(rng, max_shell=4):
    entries = {}
    for _ in range(rng.randint(1, 3)):
        n = rng.randint(1, max_shell)
        j = rng.randint(n, n * n)
        entries[((n,), (j,))] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return SpaceTimeSequence(1, entries, field="rational")


def test_zero_entries_are_dropped():
    a = ModeSequence(1, {1: 0, 2: 3})
    assert len(a) == 1
    assert 2 in ModeSequence(1, {2: 1})


def test_weighted_norm_is_exact_in_rationals():
    a = ModeSequence(1, {1: Fraction(1, 2), 3: Fraction(-1, 4)}, s=1, field="rational")
    assert a.norm() == Fraction(1, 2) * 2 + Fraction(1, 4) * 4


def test_banach_algebra_inequality():
    rng = random.Random(1234)
    for _ in range(1000):
        d = rng.choice([1, 2])
        s = rng.choice([0, 1, 2])
        a = _random_modes(rng, d, s)
        b = _random_modes(rng, d, s)
        assert mode_product(a, b).norm() <= a.norm() * b.norm()


def test_product_of_spacetime_sequences_stays_in_support():
    rng = random.Random(99)
    for _ in range(1000):
        p = rng.choice([2, 3])
        c = _random_spacetime(rng)
        power = st_power(c, p)
        for (n, j), _ in power.items():
            assert lattice.le(n, j) and lattice.le(j, lattice.square(n))
            assert lattice.in_band(n, j, p)


def test_spacetime_rejects_entries_outside_support():
    with pytest.raises(DomainError):
        SpaceTimeSequence(1, {((2,), (5,)): 1})
    with pytest.raises(DomainError):
        SpaceTimeSequence(1, {((3,), (2,)): 1})


def test_spacetime_product_example():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1}, field="rational")
    square = st_product(c, c)
    assert square.items() == [(((2,), (2,)), QComplex(1))]


def test_arithmetic_requires_same_field():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1}, field="rational")
    e = SpaceTimeSequence(1, {((1,), (1,)): 1}, field="f64")
    with pytest.raises(DomainError):
        c + e


def test_initial_data_sums_rows():
    c = SpaceTimeSequence(1, {((2,), (2,)): Fraction(1, 2), ((2,), (4,)): Fraction(-1, 2),
                              ((1,), (1,)): 1}, field="rational")
    phi = c.initial_data()
    assert phi.get((1,)) == QComplex(1)
    assert (2,) not in phi


def test_interval_norm_is_an_interval():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1, ((2,), (3,)): -2}, field="interval")
    norm = c.norm()
    assert isinstance(norm, Interval)
    assert norm.contains(3)


def test_payload_keeps_rational_strings():
    c = SpaceTimeSequence(1, {((4,), (4,)): Fraction(7, 144)}, field="rational")
    row = c.to_payload()["entries"][0]
    assert row == {"n": [4], "j": [4], "re": "7/144", "im": "0"}
    back = SpaceTimeSequence.from_payload(c.to_payload())
    assert back.get((4,), (4,)) == QComplex(Fraction(7, 144))


def test_interval_payload_accepts_pairs():
    payload = {"d": 1, "s": 0, "scalar": "interval",
               "entries": [{"n": [1], "j": [1], "re": [0.5, 0.75], "im": 0}]}
    c = SpaceTimeSequence.from_payload(payload)
    value = c.get((1,), (1,))
    assert value.re == Interval(0.5, 0.75)


def test_shell_arrays_row_sums_and_conversion():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1, ((2,), (2,)): 0.5, ((2,), (4,)): -0.5})
    shells = ShellArrays.from_sequence(c)
    assert shells.N == 2
    assert np.allclose(shells.row_sums(), [1.0, 1.0])
    assert shells.entry(2, 4) == -0.5
    assert shells.entry(2, 7) == 0
    assert shells.to_sequence().items() == c.items()


def test_unknown_scalar_field():
    with pytest.raises(DomainError):
        get_field("quad")


@pytest.mark.parametrize("p", [0, 1])
def test_powers_below_two_are_rejected(p):
    a = ModeSequence(1, {1: 1})
    c = SpaceTimeSequence(1, {((1,), (1,)): 1})
    with pytest.raises(DomainError):
        mode_power(a, p)
    with pytest.raises(DomainError):
        st_power(c, p)


def test_products_require_the_same_frequencies():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1}, omega=[1.0])
    e = SpaceTimeSequence(1, {((1,), (1,)): 1}, omega=[2.0])
    with pytest.raises(DomainError):
        st_product(c, e)
    with pytest.raises(DomainError):
        c + e
    untagged = SpaceTimeSequence(1, {((1,), (1,)): 1})
    assert st_product(c, untagged).omega.values == [1.0]
    assert (untagged - c).omega.values == [1.0]


def test_frequencies_follow_the_payload():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1}, field="rational", omega=[1.5])
    payload = c.to_payload()
    assert payload["omega"] == [1.5]
    assert SpaceTimeSequence.from_payload(payload).omega.values == [1.5]
    assert "omega" not in SpaceTimeSequence(1, {((1,), (1,)): 1}).to_payload()
    with pytest.raises(DomainError):
        SpaceTimeSequence(1, {}, omega=[1.0, 1.0])
