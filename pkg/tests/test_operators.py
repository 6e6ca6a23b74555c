import random
from fractions import Fraction

import pytest

from nlsplus.core.operators import (
    apply_K,
    apply_L,
    apply_T,
    embed_iota,
    k_norm_bound,
    project,
    residual,
)
from nlsplus.core.scalars import QComplex
from nlsplus.core.sequences import ModeSequence, SpaceTimeSequence
from nlsplus.core.solver import ProblemConfig, solve_spacetime
from nlsplus.core import lattice
from nlsplus.guards import DomainError


@pytest.mark.parametrize("N", range(1, 9))
def test_truncation_is_a_fixed_point(N):
    cfg = ProblemConfig.build(2, [1], {1: 1, 2: (Fraction(1, 2), Fraction(1, 3))}, field="rational")
    c = solve_spacetime(cfg, N, "rational")
    assert project(apply_T(cfg, cfg.phi, c), N).items() == c.items()


def test_fixed_point_for_cubic_nonlinearity():
    cfg = ProblemConfig.build(3, [1], {1: 1, 3: -2}, field="rational")
    c = solve_spacetime(cfg, 6, "rational")
    assert project(apply_T(cfg, cfg.phi, c), 6).items() == c.items()


def test_residual_vanishes_in_floating_point():
    cfg = ProblemConfig.build(2, [1], {1: 0.8 + 0.1j})
    c = solve_spacetime(cfg, 12)
    assert residual(cfg, cfg.phi, c, 12) < 1e-14


def test_k_norm_bound_values():
    assert k_norm_bound(ProblemConfig.build(2, [1], {1: 1})) == Fraction(1, 2)
    assert k_norm_bound(ProblemConfig.build(3, [1, 1], {(1, 1): 1})) == Fraction(1, 12)


def test_k_respects_its_norm_bound():
    rng = random.Random(42)
    for p in (2, 3):
        cfg = ProblemConfig.build(p, [1.5], {1: 1}, field="rational")
        bound = float(k_norm_bound(cfg))
        for _ in range(200):
            entries = {}
            for _ in range(rng.randint(1, 6)):
                n = rng.randint(p, 8)
                j = rng.randint(n, lattice.band_upper((n,), p)[0])
                entries[((n,), (j,))] = Fraction(rng.randint(-50, 50), rng.randint(1, 7))
            c = SpaceTimeSequence(1, entries, field="rational")
            assert apply_K(cfg, c).norm() <= bound * c.norm() * (1 + 1e-12)


def test_k_drops_entries_outside_the_band():
    cfg = ProblemConfig.build(2, [1], {1: 1}, field="rational")
    c = SpaceTimeSequence(1, {((2,), (2,)): 1, ((2,), (4,)): 1}, field="rational")
    assert apply_K(cfg, c).items() == [(((2,), (2,)), QComplex(Fraction(1, 2)))]


def test_l_collects_row_sums_on_the_closing_entry():
    c = SpaceTimeSequence(1, {((2,), (2,)): Fraction(1, 2), ((2,), (3,)): 1, ((2,), (4,)): 7},
                          field="rational")
    assert apply_L(c).items() == [(((2,), (4,)), QComplex(Fraction(3, 2)))]


def test_embedding_places_data_on_the_closing_entry():
    phi = ModeSequence(2, {(1, 2): 3}, field="rational")
    assert embed_iota(phi).items() == [(((1, 2), (1, 4)), QComplex(3))]
    with pytest.raises(DomainError):
        embed_iota(ModeSequence(1, {0: 1}))


def test_head_and_tail_partition_the_sequence():
    c = solve_spacetime(ProblemConfig.build(2, [1], {1: 1}, field="rational"), 6, "rational")
    head = project(c, 3, "head")
    tail = project(c, 3, "tail")
    assert max(n[0] for (n, _), _ in head.items()) == 3
    assert min(n[0] for (n, _), _ in tail.items()) == 4
    assert (head + tail).items() == c.items()
    with pytest.raises(DomainError):
        project(c, 3, "middle")


def test_field_mismatch_in_t():
    cfg = ProblemConfig.build(2, [1], {1: 1}, field="rational")
    c = solve_spacetime(ProblemConfig.build(2, [1], {1: 1}), 3)
    with pytest.raises(DomainError):
        apply_T(cfg, cfg.phi, c)


def test_interval_residual_is_a_rigorous_bound():
    cfg = ProblemConfig.build(2, [1], {1: 1}, field="interval")
    c = solve_spacetime(cfg, 6, "interval")
    bound = residual(cfg, cfg.phi, c, 6)
    assert bound.contains(0)
    assert bound.hi < 1e-12


def test_k_rejects_coefficients_of_another_frequency():
    c = solve_spacetime(ProblemConfig.build(2, [2], {1: 1}), 3)
    assert c.omega.values == [2.0]
    with pytest.raises(DomainError):
        apply_K(ProblemConfig.build(2, [1], {1: 1}), c)
