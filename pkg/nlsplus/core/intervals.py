"""
Aritmética de intervalos con redondeo hacia afuera.

Dos niveles:

* ``Interval`` / ``ComplexInterval``: escalares, un objeto por coeficiente.
  Cada operación se evalúa en redondeo al más cercano y se corrige con una
  transformación libre de error (TwoSum / TwoProduct de Dekker): si el
  resultado es exacto el intervalo no se ensancha, si no, se avanza un ulp
  solo hacia el lado donde está el valor exacto.
* ``BallArray``: arreglos numpy de bolas complejas (centro, radio) para las
  convoluciones largas de la certificación. El error de punto flotante de
  cada convolución se acota con γ_k = k·u/(1 - k·u).
"""
import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from ..guards import IntervalDivisionError, IntervalOverflowError, DomainError

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1
_SPLIT_LIMIT = 2.0 ** 996
_TINY = 2.0 ** -960

U = 2.0 ** -53
ETA = 2.0 ** -1074


# ================================
# TRANSFORMACIONES LIBRES DE ERROR
# ================================

def _finite(x: float) -> float:
    if not math.isfinite(x):
        raise IntervalOverflowError(f"Extremo de intervalo no finito: {x}")
    return x


def _two_sum(a: float, b: float) -> Tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> Tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> Tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _safe_split(*values: float) -> bool:
    return all(abs(v) < _SPLIT_LIMIT for v in values)


def _directed(value: float, err: float, upward: bool) -> float:
    """Ajusta value un ulp si el valor exacto value + err queda del lado pedido"""
    if upward:
        return math.nextafter(value, _INF) if err > 0 else value
    return math.nextafter(value, -_INF) if err < 0 else value


def add_round(a: float, b: float, upward: bool) -> float:
    s, err = _two_sum(a, b)
    _finite(s)
    return _directed(s, err, upward)


def mul_round(a: float, b: float, upward: bool) -> float:
    p = _finite(a * b)
    if p == 0.0 and (a == 0.0 or b == 0.0):
        return 0.0
    if abs(p) < _TINY or not _safe_split(a, b):
        return math.nextafter(p, _INF if upward else -_INF)
    _, err = _two_prod(a, b)
    return _directed(p, err, upward)


def div_round(a: float, b: float, upward: bool) -> float:
    q = _finite(a / b)
    if a == 0.0:
        return 0.0
    if abs(q) < _TINY or abs(a) < _TINY or not _safe_split(q, b):
        return math.nextafter(q, _INF if upward else -_INF)
    p, e = _two_prod(q, b)
    residual = (a - p) - e
    # a/b - q = residual/b
    err = residual if b > 0 else -residual
    return _directed(q, err, upward)


def sqrt_round(x: float, upward: bool) -> float:
    if x < 0:
        raise DomainError(f"Raíz cuadrada de un número negativo: {x}")
    s = math.sqrt(x)
    if s == 0.0:
        return 0.0
    if x < _TINY or not _safe_split(s):
        return math.nextafter(s, _INF if upward else -_INF)
    p, e = _two_prod(s, s)
    residual = (x - p) - e
    return _directed(s, residual, upward)


def _enclose_fraction(value: Fraction) -> Tuple[float, float]:
    f = float(value)
    _finite(f)
    exact = Fraction(f)
    if exact == value:
        return f, f
    if exact < value:
        return f, math.nextafter(f, _INF)
    return math.nextafter(f, -_INF), f


# ================================
# INTERVALO REAL
# ================================

@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        _finite(self.lo)
        _finite(self.hi)
        if self.lo > self.hi:
            raise DomainError(f"Intervalo mal formado: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        x = float(x)
        return cls(x, x)

    @classmethod
    def from_value(cls, value) -> "Interval":
        """Encierra exactamente un int, float, Fraction o cadena racional"""
        if isinstance(value, Interval):
            return value
        if isinstance(value, float):
            return cls(value, value)
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, (int, Fraction)):
            lo, hi = _enclose_fraction(Fraction(value))
            return cls(lo, hi)
        raise TypeError(f"No se puede convertir {type(value).__name__} a Interval")

    # ----------------------
    # Consultas
    # ----------------------

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            return self.lo <= x <= self.hi
        x = Fraction(x)
        return Fraction(self.lo) <= x <= Fraction(self.hi)

    def width(self) -> float:
        return add_round(self.hi, -self.lo, upward=True)

    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def is_zero(self) -> bool:
        return self.lo == 0.0 and self.hi == 0.0

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    # ----------------------
    # Aritmética
    # ----------------------

    def __add__(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval(add_round(self.lo, other.lo, False), add_round(self.hi, other.hi, True))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        other = _as_interval(other)
        return Interval(add_round(self.lo, -other.hi, False), add_round(self.hi, -other.lo, True))

    def __rsub__(self, other) -> "Interval":
        return _as_interval(other) - self

    def __mul__(self, other) -> "Interval":
        other = _as_interval(other)
        pairs = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        return Interval(min(mul_round(a, b, False) for a, b in pairs),
                        max(mul_round(a, b, True) for a, b in pairs))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = _as_interval(other)
        if other.contains_zero():
            raise IntervalDivisionError(f"División por un intervalo que contiene 0: {other}")
        pairs = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        return Interval(min(div_round(a, b, False) for a, b in pairs),
                        max(div_round(a, b, True) for a, b in pairs))

    def __rtruediv__(self, other) -> "Interval":
        return _as_interval(other) / self

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int) or k < 0:
            raise DomainError(f"Solo potencias enteras no negativas (recibido {k!r})")
        result = Interval(1.0, 1.0)
        for _ in range(k):
            result = result * self
        if k % 2 == 0 and k > 0 and result.lo < 0:
            result = Interval(0.0, result.hi)
        return result

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise DomainError(f"Raíz de un intervalo con parte negativa: {self}")
        return Interval(sqrt_round(self.lo, False), sqrt_round(self.hi, True))

    def to_pair(self) -> List[float]:
        return [self.lo, self.hi]

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"


def _as_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.from_value(value)


# ================================
# INTERVALO COMPLEJO (RECTÁNGULO)
# ================================

@dataclass(frozen=True, slots=True)
class ComplexInterval:
    re: Interval
    im: Interval

    @classmethod
    def point(cls, z) -> "ComplexInterval":
        z = complex(z)
        return cls(Interval.point(z.real), Interval.point(z.imag))

    @classmethod
    def from_value(cls, value) -> "ComplexInterval":
        if isinstance(value, ComplexInterval):
            return value
        if isinstance(value, Interval):
            return cls(value, Interval(0.0, 0.0))
        if isinstance(value, complex):
            return cls.point(value)
        if hasattr(value, "re") and hasattr(value, "im"):
            return cls(Interval.from_value(value.re), Interval.from_value(value.im))
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(Interval.from_value(value[0]), Interval.from_value(value[1]))
        return cls(Interval.from_value(value), Interval(0.0, 0.0))

    @classmethod
    def zero(cls) -> "ComplexInterval":
        return cls(Interval(0.0, 0.0), Interval(0.0, 0.0))

    def contains(self, z) -> bool:
        if isinstance(z, ComplexInterval):
            return self.re.contains(z.re) and self.im.contains(z.im)
        if hasattr(z, "re") and hasattr(z, "im"):
            return self.re.contains(z.re) and self.im.contains(z.im)
        z = complex(z)
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def mid(self) -> complex:
        return complex(self.re.mid(), self.im.mid())

    def width(self) -> float:
        return max(self.re.width(), self.im.width())

    def __add__(self, other) -> "ComplexInterval":
        other = ComplexInterval.from_value(other)
        return ComplexInterval(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "ComplexInterval":
        return ComplexInterval(-self.re, -self.im)

    def __sub__(self, other) -> "ComplexInterval":
        other = ComplexInterval.from_value(other)
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "ComplexInterval":
        return ComplexInterval.from_value(other) - self

    def __mul__(self, other) -> "ComplexInterval":
        if isinstance(other, Interval):
            return ComplexInterval(self.re * other, self.im * other)
        other = ComplexInterval.from_value(other)
        return ComplexInterval(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ComplexInterval":
        """División por un real (Interval o número); 0 no puede estar en el divisor"""
        if isinstance(other, ComplexInterval):
            if not other.im.is_zero():
                raise DomainError("Solo se admite división por intervalos reales")
            other = other.re
        other = _as_interval(other)
        return ComplexInterval(self.re / other, self.im / other)

    def __pow__(self, k: int) -> "ComplexInterval":
        result = ComplexInterval.point(1.0)
        for _ in range(k):
            result = result * self
        return result

    def abs_upper(self) -> float:
        x = max(abs(self.re.lo), abs(self.re.hi))
        y = max(abs(self.im.lo), abs(self.im.hi))
        return sqrt_round(add_round(mul_round(x, x, True), mul_round(y, y, True), True), True)

    def abs_lower(self) -> float:
        x = self.re.mig()
        y = self.im.mig()
        return sqrt_round(add_round(mul_round(x, x, False), mul_round(y, y, False), False), False)

    def abs(self) -> Interval:
        return Interval(self.abs_lower(), self.abs_upper())

    def __repr__(self) -> str:
        return f"ComplexInterval({self.re!r}, {self.im!r})"


# Nombres funcionales

def iv_add(a: Interval, b: Interval) -> Interval:
    return a + b


def iv_sub(a: Interval, b: Interval) -> Interval:
    return a - b


def iv_mul(a: Interval, b: Interval) -> Interval:
    return a * b


def iv_div(a: Interval, b: Interval) -> Interval:
    return a / b


def civ_mul(a: ComplexInterval, b: ComplexInterval) -> ComplexInterval:
    return a * b


def civ_abs_upper(z: ComplexInterval) -> float:
    return z.abs_upper()


# ================================
# BOLAS VECTORIZADAS (NUMPY)
# ================================

def gamma(k: int) -> float:
    ku = k * U
    if ku >= 1:
        raise IntervalOverflowError(f"γ_{k} no está definido en doble precisión")
    return ku / (1 - ku)


def inflate(x, ops: int):
    """Cota superior de una cantidad no negativa calculada con `ops` operaciones"""
    out = np.asarray(x, dtype=np.float64) * (1.0 + gamma(ops + 4)) + (ops + 4) * ETA
    out = np.nextafter(out, _INF)
    if not np.all(np.isfinite(out)):
        raise IntervalOverflowError("Radio no finito en la aritmética de bolas")
    return out


class BallArray:
    """Vector de bolas complejas {z : |z - mid_k| ≤ rad_k}"""

    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=None):
        self.mid = np.asarray(mid, dtype=np.complex128)
        self.rad = np.zeros(self.mid.shape, dtype=np.float64) if rad is None else np.asarray(rad, dtype=np.float64)
        if self.mid.shape != self.rad.shape:
            raise DomainError("Centro y radio con formas distintas")
        if not (np.all(np.isfinite(self.mid)) and np.all(np.isfinite(self.rad))):
            raise IntervalOverflowError("Bola con centro o radio no finito")

    @classmethod
    def from_intervals(cls, values: List[ComplexInterval]) -> "BallArray":
        """Bolas que contienen cada rectángulo; los puntos quedan con radio 0"""
        mids = np.empty(len(values), dtype=np.complex128)
        rads = np.zeros(len(values), dtype=np.float64)
        for k, z in enumerate(values):
            mids[k] = z.mid()
            if z.width() > 0:
                mre, mim = mids[k].real, mids[k].imag
                half_re = max(add_round(z.re.hi, -mre, True), add_round(mre, -z.re.lo, True))
                half_im = max(add_round(z.im.hi, -mim, True), add_round(mim, -z.im.lo, True))
                rads[k] = inflate(math.hypot(half_re, half_im), 2)
        return cls(mids, rads)

    def __len__(self) -> int:
        return self.mid.shape[0]

    def abs_upper(self) -> np.ndarray:
        return inflate(inflate(np.abs(self.mid), 2) + self.rad, 1)

    def abs_lower(self) -> np.ndarray:
        low = np.abs(self.mid) * (1.0 - gamma(3)) - self.rad
        return np.maximum(np.nextafter(low, -_INF), 0.0)

    def scaled(self, factor: float) -> "BallArray":
        """Multiplicación exacta por una potencia de dos"""
        m, e = math.frexp(factor)
        if m != 0.5:
            raise DomainError("scaled() solo admite potencias de dos")
        return BallArray(self.mid * factor, self.rad * factor)

    def __add__(self, other: "BallArray") -> "BallArray":
        mid = self.mid + other.mid
        rad = inflate(self.rad + other.rad + 2 * U * np.abs(mid), 4)
        return BallArray(mid, rad)

    def convolve(self, other: "BallArray") -> "BallArray":
        """Convolución directa (np.convolve, sin FFT) con cota rigurosa del error"""
        k = min(len(self), len(other))
        mid = np.convolve(self.mid, other.mid)
        am = inflate(np.abs(self.mid), 2)
        bm = inflate(np.abs(other.mid), 2)
        magnitude = inflate(np.convolve(am, bm), 2 * k)
        rad = 2 * gamma(k + 4) * magnitude
        if np.any(self.rad) or np.any(other.rad):
            cross = np.convolve(am, other.rad) + np.convolve(self.rad, inflate(bm + other.rad, 1))
            rad = rad + inflate(cross, 2 * k + 1)
        return BallArray(mid, inflate(rad, 2))

    def divided_by(self, dlo: np.ndarray, dhi: np.ndarray) -> "BallArray":
        """z / d con d ∈ [dlo, dhi] ⊂ (0, ∞), componente a componente"""
        if np.any(dlo <= 0):
            raise IntervalDivisionError("Denominador no positivo en la recursión")
        qlo = np.nextafter(1.0 / dhi, -_INF)
        qhi = np.nextafter(1.0 / dlo, _INF)
        qm = 0.5 * qlo + 0.5 * qhi
        qr = inflate(np.maximum(qhi - qm, qm - qlo), 1)
        mid = self.mid * qm
        am = inflate(np.abs(self.mid), 2)
        rad = am * qr + self.rad * (qm + qr) + 2 * U * am * qm
        return BallArray(mid, inflate(rad, 6))

    def total(self) -> Tuple[complex, float]:
        """Suma de todas las bolas como (centro, radio)"""
        k = max(len(self), 1)
        mid = complex(np.sum(self.mid))
        am = inflate(np.abs(self.mid), 2)
        rad = float(inflate(np.sum(self.rad) + gamma(k) * np.sum(am), k + 2))
        return mid, rad

    def sum_abs(self) -> Interval:
        """Σ|z_k| encerrada"""
        k = max(len(self), 1)
        upper = float(inflate(np.sum(self.abs_upper()), k))
        lower = float(np.sum(self.abs_lower())) * (1.0 - gamma(k + 2))
        return Interval(max(math.nextafter(lower, -_INF), 0.0), upper)

    def entry(self, k: int) -> ComplexInterval:
        m = self.mid[k]
        r = float(self.rad[k])
        return ComplexInterval(
            Interval(math.nextafter(m.real - r, -_INF), math.nextafter(m.real + r, _INF)),
            Interval(math.nextafter(m.imag - r, -_INF), math.nextafter(m.imag + r, _INF)),
        )

    def to_intervals(self) -> List[ComplexInterval]:
        return [self.entry(k) for k in range(len(self))]

    def update_digest(self, digest: "hashlib._Hash") -> None:
        digest.update(np.ascontiguousarray(self.mid).tobytes())
        digest.update(np.ascontiguousarray(self.rad).tobytes())
