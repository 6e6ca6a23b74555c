import random
from fractions import Fraction

import numpy as np
import pytest

from nlsplus.core.intervals import BallArray, Interval
from nlsplus.core.operators import apply_T, project
from nlsplus.core.scalars import QComplex
from nlsplus.core.solver import ProblemConfig, solve_shells, solve_spacetime
from nlsplus.core.sequences import SpaceTimeSequence, shell_length
from nlsplus.core.verifier import (
    RadiiReport,
    ShellEnclosure,
    compute_Y0,
    compute_Z1,
    compute_Z2,
    enclose_truncation,
    prove_periodic,
    radii_check,
    recheck_report,
    root_range,
)
from nlsplus.guards import CertificationError, DomainError


@pytest.fixture(scope="module")
def small_certificate():
    return prove_periodic(2, 1, 40)


def test_enclosure_contains_exact_coefficients(example_shells):
    chat = enclose_truncation(1, 1, 5)
    for n, row in example_shells.items():
        for j, value in row.items():
            assert chat.entry(n, j).contains(QComplex(value))


def test_enclosure_with_inexact_frequency():
    cfg = ProblemConfig.build(2, [0.7], {1: 1.5}, field="rational")
    exact = solve_spacetime(cfg, 6, "rational")
    chat = enclose_truncation(1.5, 0.7, 6)
    for (n, j), value in exact.items():
        assert chat.entry(n[0], j[0]).contains(value)


def test_enclosure_digest_is_deterministic():
    assert enclose_truncation(2, 1, 12).digest() == enclose_truncation(2, 1, 12).digest()
    assert enclose_truncation(2, 1, 12).digest() != enclose_truncation(2.5, 1, 12).digest()


def test_certification_needs_one_dimension():
    with pytest.raises(DomainError):
        enclose_truncation(1, [1, 1], 5)


def test_z2_value():
    assert compute_Z2(1, 110).contains(Fraction(2, 12321))


def test_trivial_verdicts():
    z2 = Interval.from_value(1)
    assert radii_check(Interval.from_value(1), Interval.from_value(2), z2, 0.5)[0] == "inconclusive"
    assert radii_check(Interval.from_value(0.1), Interval.from_value(0.1), z2, 0.0)[0] == "inconclusive"
    verdict, P = radii_check(Interval.from_value(0.01), Interval.from_value(0.1), Interval.from_value(0.01), 0.1)
    assert verdict == "certified"
    assert P.hi < 0


def test_widening_never_flips_to_certified():
    Z1 = Interval.from_value(0.5)
    Z2 = Interval.from_value(0.1)
    for r in np.logspace(-3, 2, 30):
        narrow, _ = radii_check(Interval(0.05, 0.06), Z1, Z2, float(r))
        wide, _ = radii_check(Interval(0.0, 0.2), Z1, Z2, float(r))
        if narrow == "inconclusive":
            assert wide == "inconclusive"


def test_small_amplitude_is_certified(small_certificate):
    report = small_certificate
    assert report.verdict == "certified"
    assert report.Pr[1] < 0
    assert report.Z1[1] < 1
    assert report.root_range is not None
    lo, hi = report.root_range
    assert lo <= report.r <= hi
    assert lo >= report.Y0[1]


def test_certified_radius_bounds_the_true_tail(small_certificate):
    shells = solve_shells({1: 2.0}, 2, 1.0, 60)
    tail = shells.row_sums()[40:].sum()
    assert tail <= small_certificate.root_range[0]


def test_large_amplitude_is_inconclusive_for_every_radius():
    report = prove_periodic(6, 1, 40, sweep=True)
    assert report.verdict == "inconclusive"
    assert report.r_candidates >= 61
    assert report.root_range is None


def test_explicit_radius_is_used():
    report = prove_periodic(2, 1, 20, r=1e-12)
    assert report.r == 1e-12
    assert report.r_candidates == 1


def test_report_recheck_round_trip(small_certificate):
    again = RadiiReport.model_validate_json(small_certificate.model_dump_json())
    verdict, P = recheck_report(again)
    assert verdict == small_certificate.verdict
    assert P.to_pair() == list(small_certificate.Pr)


def test_recheck_rejects_other_powers(small_certificate):
    bad = small_certificate.model_copy(update={"p": 3})
    with pytest.raises(CertificationError):
        recheck_report(bad)


def test_frequency_scaling_pairs_radii():
    base = prove_periodic(2, 1, 30)
    scaled = prove_periodic(8, 2, 30, r=4 * base.r)
    assert scaled.verdict == base.verdict == "certified"
    assert scaled.Z1[1] == pytest.approx(base.Z1[1], rel=1e-9)
    assert scaled.Y0[1] == pytest.approx(4 * base.Y0[1], rel=1e-9)
    assert scaled.Z2[1] == pytest.approx(base.Z2[1] / 4, rel=1e-12)
    assert root_range(Interval(*scaled.Y0), Interval(*scaled.Z1), Interval(*scaled.Z2)) is not None


@pytest.mark.slow
def test_critical_amplitude_proof_reproduction():
    report = prove_periodic(3, 1, 110, r=32)
    assert report.verdict == "certified"
    assert report.Pr[1] < 0


def _random_truncation(rng, N, scale):
    shells = [None]
    entries = {}
    for n in range(1, N + 1):
        values = np.array([complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))
                           for _ in range(shell_length(n))])
        shells.append(BallArray(values))
        for offset, value in enumerate(values):
            entries[((n,), (n + offset,))] = complex(value)
    return ShellEnclosure(1.0, 1.0, N, shells), SpaceTimeSequence(1, entries)


@pytest.mark.parametrize("A, omega", [(0.5, 1), (3, 2), (Fraction(7, 4), 1)])
def test_bounds_for_a_single_shell(A, omega):
    chat = enclose_truncation(A, omega, 1)
    assert compute_Y0(chat, omega, 1).contains(Fraction(A) ** 2 / omega ** 2)
    assert compute_Z1(chat, omega, 1).contains(Fraction(A) / omega ** 2)


def test_y0_bounds_the_tail_of_t():
    rng = random.Random(11)
    for _ in range(30):
        N = rng.randint(2, 6)
        omega = rng.choice([1.0, 1.5])
        chat, c = _random_truncation(rng, N, rng.choice([0.1, 1.0, 3.0]))
        cfg = ProblemConfig.build(2, [omega], {1: 1})
        tail = project(apply_T(cfg, cfg.phi, c), N, "tail").norm()
        Y0 = compute_Y0(chat, omega, N)
        assert tail <= Y0.hi * (1 + 1e-9)


def test_y0_of_an_empty_truncation_is_zero():
    chat = ShellEnclosure(0j, 1.0, 0, [None])
    Y0 = compute_Y0(chat, 1, 5)
    assert Y0.lo == Y0.hi == 0.0


def test_z1_decreases_with_the_truncation_order():
    values = [compute_Z1(enclose_truncation(2, 1, N), 1, N).hi for N in (10, 20, 40)]
    assert values[0] > values[1] > values[2]


def test_bounds_reject_shells_above_the_order():
    chat = enclose_truncation(1, 1, 6)
    with pytest.raises(DomainError):
        compute_Y0(chat, 1, 5)
    with pytest.raises(DomainError):
        compute_Z1(chat, 1, 5)


def test_rational_amplitude_is_enclosed_exactly():
    A = QComplex(Fraction(1, 10))
    exact = solve_spacetime(ProblemConfig.build(2, [1], {1: Fraction(1, 10)}, field="rational"), 6, "rational")
    chat = enclose_truncation(A, 1, 6)
    for (n, j), value in exact.items():
        assert chat.entry(n[0], j[0]).contains(value)
    report = prove_periodic(A, 1, 10)
    assert report.A_exact == ("1/10", "0")
    assert report.verdict == "certified"
