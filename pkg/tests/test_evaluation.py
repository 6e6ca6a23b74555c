import cmath
import math

import numpy as np
import pytest

from nlsplus.core.evaluation import (
    GridSpec,
    conserved_V,
    emit_grid,
    eval_solution,
    galerkin_rhs,
    integrate_galerkin,
    partial_l2,
    time_averaged_l2,
)
from nlsplus.core.sequences import ModeSequence, SpaceTimeSequence
from nlsplus.core.solver import monochromatic_coeffs, solve_shells, zero_mode_solution
from nlsplus.guards import DivergenceError, DomainError


def test_eval_single_coefficient():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1})
    assert eval_solution(c, 1, 0.3, 0.2) == pytest.approx(cmath.exp(0.5j))
    assert eval_solution(c, 2, 0.1, 0.0) == pytest.approx(cmath.exp(0.4j))


def test_eval_recovers_initial_data():
    c = monochromatic_coeffs(1, 1, 2, 40)
    for x in [0.0, 0.7, 2.5]:
        assert abs(eval_solution(c, 1, 0.0, x) - cmath.exp(1j * x)) < 1e-12


def test_eval_rejects_dimension_mismatch():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1})
    with pytest.raises(DomainError):
        eval_solution(c, [1, 1], 0.0, 0.0)


def test_grid_layout_has_time_outside():
    c = SpaceTimeSequence(1, {((1,), (1,)): 1})
    grid = GridSpec(t_min=0.0, t_max=1.0, nt=2, x_min=[0.0], x_max=[math.pi], nx=[2])
    frame = emit_grid(c, 1, grid)
    assert list(frame.columns) == ["t", "x", "re", "im", "abs"]
    assert frame["t"].tolist() == [0.0, 0.0, 1.0, 1.0]
    assert frame["x"].tolist() == pytest.approx([0.0, math.pi, 0.0, math.pi])
    assert frame["re"].iloc[1] == pytest.approx(-1.0)
    assert frame["abs"].tolist() == pytest.approx([1.0] * 4)


def test_grid_in_two_dimensions():
    c = SpaceTimeSequence(2, {((1, 1), (1, 1)): 1})
    grid = GridSpec(t_min=0.0, t_max=1.0, nt=3, x_min=[0.0, 0.0], x_max=[1.0, 1.0], nx=[2, 3])
    frame = emit_grid(c, [1, 1], grid)
    assert list(frame.columns) == ["t", "x1", "x2", "re", "im", "abs"]
    assert len(frame) == 3 * 6
    row = frame.iloc[5]
    assert row["re"] + 1j * row["im"] == pytest.approx(eval_solution(c, [1, 1], row["t"], (row["x1"], row["x2"])))


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(t_min=1.0, t_max=0.0, nt=3, x_min=[0.0], x_max=[1.0], nx=[2])
    with pytest.raises(ValueError):
        GridSpec(t_min=0.0, t_max=1.0, nt=3, x_min=[0.0], x_max=[1.0, 2.0], nx=[2])


def test_galerkin_rhs_examples():
    z = 0.3 + 0.4j
    rhs = galerkin_rhs(ModeSequence(1, {0: z}), 1, 2, 3)
    assert rhs.get((0,)) == pytest.approx(-1j * z * z)

    rhs = galerkin_rhs(ModeSequence(1, {1: 1}), 1, 2, 2)
    assert rhs.get((1,)) == pytest.approx(1j)
    assert rhs.get((2,)) == pytest.approx(-1j)
    assert (2,) not in galerkin_rhs(ModeSequence(1, {1: 1}), 1, 2, 1)


def test_rk4_agrees_with_series_and_is_periodic():
    N = 20
    trajectory = integrate_galerkin({1: 1}, 1, 2, N, 2 * math.pi, 1e-3)
    c = monochromatic_coeffs(1, 1, 2, N)
    t_end = trajectory.time_grid[-1]
    assert t_end == pytest.approx(2 * math.pi)
    for n in range(1, 11):
        series = sum(complex(c.get((n,), (j,))) * cmath.exp(1j * j * t_end) for j in range(n, n * n + 1))
        assert abs(trajectory.at(n)[-1] - series) < 1e-6
        assert abs(trajectory.at(n)[-1] - trajectory.at(n)[0]) < 1e-6


def test_rk4_zero_mode_matches_closed_form():
    trajectory = integrate_galerkin({0: 1}, 1, 2, 1, 1.0, 1e-3)
    assert trajectory.at(0)[-1] == pytest.approx(zero_mode_solution(1, 2, 1.0), abs=1e-10)


def test_rk4_last_step_lands_on_t_end():
    trajectory = integrate_galerkin({1: 0.1}, 1, 2, 3, 0.25, 0.1)
    assert trajectory.time_grid.tolist() == pytest.approx([0.0, 0.1, 0.2, 0.25])


def test_rk4_with_empty_data_stays_at_zero():
    trajectory = integrate_galerkin({}, 1, 2, 3, 1.0, 0.1)
    assert trajectory.samples.shape == (4, 11)
    assert np.all(trajectory.samples == 0)


def test_rk4_divergence_is_reported():
    with pytest.raises(DivergenceError) as info:
        integrate_galerkin({0: 1e200}, 1, 2, 2, 1.0, 0.1)
    assert info.value.last_finite_time == 0.0


def test_rk4_rejects_modes_beyond_truncation():
    with pytest.raises(DomainError):
        integrate_galerkin({5: 1}, 1, 2, 3, 1.0, 0.1)


def test_conserved_quantity():
    assert conserved_V(1, 2) == pytest.approx(2.0)
    assert conserved_V(1j, 2) == pytest.approx(0.0)
    assert conserved_V(2, 3) == pytest.approx(0.5)
    for t in [0.0, 1.0, 5.0]:
        assert conserved_V(zero_mode_solution(1, 2, t), 2) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        conserved_V(0, 2)


def test_partial_l2_at_time_zero():
    ctilde = solve_shells({1: 1.0}, 2, 1.0, 10)
    assert partial_l2(ctilde, 0.5, 1, 10, 0.0) == pytest.approx(0.25, abs=1e-12)
    assert partial_l2(ctilde, 0.5, 2, 10, 0.0) == pytest.approx(0.25, abs=1e-12)


def test_time_average_grows_for_blowup_amplitude():
    ctilde = solve_shells({1: 1.0}, 2, 1.0, 20)
    values = [time_averaged_l2(ctilde, 6, 1, M) for M in (5, 10, 20)]
    assert values[0] < values[1] < values[2]
    assert values[2] >= sum(36 * n * n for n in range(1, 21))


def test_diagnostics_need_enough_shells():
    ctilde = solve_shells({1: 1.0}, 2, 1.0, 5)
    with pytest.raises(DomainError):
        time_averaged_l2(ctilde, 1, 1, 8)
