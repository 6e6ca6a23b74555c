import math
import operator
import random
from fractions import Fraction

import numpy as np
import pytest

from nlsplus.core.intervals import (
    BallArray,
    ComplexInterval,
    Interval,
    civ_abs_upper,
    civ_mul,
    inflate,
    iv_add,
    iv_div,
    iv_mul,
    iv_sub,
)
from nlsplus.core.scalars import QComplex
from nlsplus.guards import DomainError, IntervalDivisionError

OPS = [operator.add, operator.sub, operator.mul, operator.truediv]


def _random_fraction(rng):
    return Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 10 ** 4))


def test_exact_operations_do_not_widen():
    a = Interval.point(1.5)
    b = Interval.point(2.25)
    assert (a + b).width() == 0.0
    assert (a * b).width() == 0.0
    assert (b / a).width() == 0.0


def test_inexact_fraction_is_one_ulp_wide():
    third = Interval.from_value(Fraction(1, 3))
    assert third.contains(Fraction(1, 3))
    assert third.hi == math.nextafter(third.lo, math.inf)


def test_inexact_sum_rounds_outward():
    third = Interval.point(float(Fraction(1, 3)))
    total = third + Interval.point(1e-20)
    exact = Fraction(float(Fraction(1, 3))) + Fraction(1e-20)
    assert total.contains(exact)
    assert total.width() > 0.0


def test_random_rational_operands_are_contained():
    rng = random.Random(20240601)
    for _ in range(1000):
        a = _random_fraction(rng)
        b = _random_fraction(rng)
        if b == 0:
            continue
        op = rng.choice(OPS)
        result = op(Interval.from_value(a), Interval.from_value(b))
        assert result.contains(op(a, b))


def test_inclusion_isotonicity():
    rng = random.Random(7)
    for _ in range(1000):
        a = _random_fraction(rng)
        extra = _random_fraction(rng)
        b = _random_fraction(rng)
        if b == 0 or extra == 0:
            continue
        op = rng.choice(OPS)
        x = Interval.from_value(a)
        e = Interval.from_value(extra)
        wide = Interval(min(x.lo, e.lo), max(x.hi, e.hi))
        y = Interval.from_value(b)
        if op is operator.truediv and y.contains_zero():
            continue
        assert op(wide, y).contains(op(x, y))


def test_division_by_interval_containing_zero():
    with pytest.raises(IntervalDivisionError):
        Interval(1.0, 2.0) / Interval(-1.0, 1.0)


def test_malformed_interval():
    with pytest.raises(DomainError):
        Interval(2.0, 1.0)


def test_sqrt_encloses():
    root = Interval.from_value(2).sqrt()
    assert Fraction(root.lo) ** 2 <= 2 <= Fraction(root.hi) ** 2
    assert Interval.point(9.0).sqrt() == Interval(3.0, 3.0)


def test_even_power_is_non_negative():
    assert (Interval(-1.0, 2.0) ** 2).lo == 0.0


def test_complex_modulus_of_exact_point():
    z = ComplexInterval.point(3 + 4j)
    assert z.abs() == Interval(5.0, 5.0)


def test_complex_product_contains_rational_product():
    rng = random.Random(3)
    for _ in range(1000):
        x = QComplex(_random_fraction(rng), _random_fraction(rng))
        y = QComplex(_random_fraction(rng), _random_fraction(rng))
        assert (ComplexInterval.from_value(x) * ComplexInterval.from_value(y)).contains(x * y)


def test_complex_from_pair_of_strings():
    z = ComplexInterval.from_value(("1/3", "2"))
    assert z.contains(QComplex(Fraction(1, 3), 2))


def _inside(ball: BallArray, exact):
    for mid, rad, value in zip(ball.mid, ball.rad, exact):
        dre = value.real - Fraction(float(mid.real))
        dim = value.imag - Fraction(float(mid.imag))
        assert dre * dre + dim * dim <= Fraction(float(rad)) ** 2


class _Exact:
    def __init__(self, real, imag):
        self.real = real
        self.imag = imag


def _exact_convolution(a, b):
    out = [[Fraction(0), Fraction(0)] for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            xr, xi = Fraction(x.real), Fraction(x.imag)
            yr, yi = Fraction(y.real), Fraction(y.imag)
            out[i + k][0] += xr * yr - xi * yi
            out[i + k][1] += xr * yi + xi * yr
    return [_Exact(re, im) for re, im in out]


def test_ball_convolution_encloses_exact_result():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = rng.normal(size=7) + 1j * rng.normal(size=7)
        b = rng.normal(size=5) + 1j * rng.normal(size=5)
        ball = BallArray(a).convolve(BallArray(b))
        _inside(ball, _exact_convolution(a, b))


def test_ball_division_encloses_exact_quotient():
    values = np.array([1 + 1j, -2.5 + 0.1j, 1e-3 - 7j])
    den = np.array([3.0, 7.0, 11.0])
    ball = BallArray(values).divided_by(den, den)
    exact = [_Exact(Fraction(v.real) / Fraction(d), Fraction(v.imag) / Fraction(d)) for v, d in zip(values, den)]
    _inside(ball, exact)


def test_ball_scaling_only_by_powers_of_two():
    ball = BallArray(np.array([1 + 1j]))
    assert ball.scaled(2.0).mid[0] == 2 + 2j
    with pytest.raises(DomainError):
        ball.scaled(3.0)


def test_ball_sum_abs_encloses_row_sum():
    ball = BallArray(np.array([3 + 4j, -6 + 8j]))
    total = ball.sum_abs()
    assert total.contains(15.0)


def test_inflate_is_an_upper_bound():
    x = np.array([1.0, 1e-300, 0.0])
    assert np.all(inflate(x, 3) >= x)


def test_functional_names():
    a = Interval.from_value(Fraction(1, 3))
    b = Interval.point(2.0)
    assert iv_add(a, b).contains(Fraction(7, 3))
    assert iv_sub(a, b).contains(Fraction(-5, 3))
    assert iv_mul(a, b).contains(Fraction(2, 3))
    assert iv_div(a, b).contains(Fraction(1, 6))
    z = ComplexInterval.point(1 + 2j)
    assert civ_mul(z, z).contains(QComplex(-3, 4))
    assert civ_abs_upper(ComplexInterval.point(3 + 4j)) >= 5.0
