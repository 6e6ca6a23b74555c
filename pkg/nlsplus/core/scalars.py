"""
Campos escalares intercambiables: complejos f64, racionales gaussianos
exactos y rectángulos de intervalos.

Toda la maquinaria de secuencias es genérica en el campo; cada campo sabe
convertir valores, dividir por pesos reales positivos ω²·m y acotar módulos.
"""
import math
from fractions import Fraction
from typing import Any, Dict, Tuple, Union

from ..guards import DomainError
from .intervals import ComplexInterval, Interval, sqrt_round

Number = Union[int, float, complex, Fraction, str]


def to_fraction(value) -> Fraction:
    """Conversión exacta (los float se toman con su valor binario exacto)"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"No se puede convertir {type(value).__name__} a racional")


class QComplex:
    """Complejo con partes racionales exactas"""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_fraction(re)
        self.im = to_fraction(im)

    @classmethod
    def from_value(cls, value) -> "QComplex":
        if isinstance(value, QComplex):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(value[0], value[1])
        return cls(value, 0)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other) -> "QComplex":
        other = QComplex.from_value(other)
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> "QComplex":
        other = QComplex.from_value(other)
        return QComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> "QComplex":
        return QComplex.from_value(other) - self

    def __neg__(self) -> "QComplex":
        return QComplex(-self.re, -self.im)

    def __mul__(self, other) -> "QComplex":
        if isinstance(other, (int, Fraction)):
            return QComplex(self.re * other, self.im * other)
        other = QComplex.from_value(other)
        return QComplex(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QComplex":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("División racional por cero")
            return QComplex(self.re / other, self.im / other)
        other = QComplex.from_value(other)
        den = other.abs2()
        if den == 0:
            raise ZeroDivisionError("División racional por cero")
        num = self * other.conjugate()
        return QComplex(num.re / den, num.im / den)

    def __pow__(self, k: int) -> "QComplex":
        if k < 0:
            return QComplex(1) / (self ** (-k))
        result = QComplex(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            other = QComplex.from_value(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"QComplex({self.re}, {self.im})"


# ================================
# CAMPOS
# ================================

class ScalarField:
    name = "abstract"

    def coerce(self, value) -> Any:
        raise NotImplementedError

    def zero(self) -> Any:
        return self.coerce(0)

    def real(self, value) -> Any:
        """Real del campo que actúa como divisor"""
        raise NotImplementedError

    def divide(self, x, w) -> Any:
        return x / w

    def is_zero(self, x) -> bool:
        return x == 0

    def modulus(self, x) -> Any:
        """|x| en el tipo real del campo (exacto cuando se puede)"""
        raise NotImplementedError

    def abs_upper(self, x) -> float:
        raise NotImplementedError

    def to_pair(self, x) -> Tuple[Any, Any]:
        raise NotImplementedError

    def to_complex(self, x) -> complex:
        return complex(x)

    def __repr__(self) -> str:
        return f"<ScalarField {self.name}>"


class ComplexField(ScalarField):
    name = "f64"

    def coerce(self, value) -> complex:
        if isinstance(value, QComplex):
            return complex(value)
        if isinstance(value, ComplexInterval):
            return value.mid()
        if isinstance(value, (tuple, list)):
            return complex(float(to_fraction(value[0])), float(to_fraction(value[1])))
        if isinstance(value, str):
            return complex(float(to_fraction(value)))
        return complex(value)

    def real(self, value) -> float:
        return float(value)

    def modulus(self, x) -> float:
        return abs(x)

    def abs_upper(self, x) -> float:
        return abs(x)

    def to_pair(self, x) -> Tuple[float, float]:
        return x.real, x.imag


class RationalField(ScalarField):
    name = "rational"

    def coerce(self, value) -> QComplex:
        if isinstance(value, ComplexInterval):
            raise DomainError("No se puede convertir un intervalo a racional exacto")
        return QComplex.from_value(value)

    def real(self, value) -> Fraction:
        return to_fraction(value)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def modulus(self, x):
        if x.im == 0:
            return abs(x.re)
        if x.re == 0:
            return abs(x.im)
        return math.sqrt(float(x.abs2()))

    def abs_upper(self, x) -> float:
        return sqrt_round(Interval.from_value(x.abs2()).hi, True)

    def to_pair(self, x) -> Tuple[str, str]:
        return str(x.re), str(x.im)


class IntervalField(ScalarField):
    name = "interval"

    def coerce(self, value) -> ComplexInterval:
        return ComplexInterval.from_value(value)

    def real(self, value) -> Interval:
        return Interval.from_value(value)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def modulus(self, x) -> Interval:
        return x.abs()

    def abs_upper(self, x) -> float:
        return x.abs_upper()

    def to_pair(self, x) -> Tuple[list, list]:
        return x.re.to_pair(), x.im.to_pair()

    def to_complex(self, x) -> complex:
        return x.mid()


SCALAR_FIELDS: Dict[str, ScalarField] = {
    "f64": ComplexField(),
    "rational": RationalField(),
    "interval": IntervalField(),
}


def get_field(name: Union[str, ScalarField, None]) -> ScalarField:
    if name is None:
        return SCALAR_FIELDS["f64"]
    if isinstance(name, ScalarField):
        return name
    try:
        return SCALAR_FIELDS[name]
    except KeyError:
        raise DomainError(f"Campo escalar desconocido: {name!r} (opciones: {sorted(SCALAR_FIELDS)})")


def omega_square(field: ScalarField, omega_i: float):
    """ω_i² como real del campo"""
    if isinstance(field, IntervalField):
        w = Interval.point(omega_i)
        return w * w
    return field.real(omega_i) * field.real(omega_i)


def weight(field: ScalarField, omega, m) -> Any:
    """ω²·m = Σ ω_i² m_i en el tipo real del campo"""
    total = field.real(0)
    for w, k in zip(omega.values, m):
        total = total + omega_square(field, w) * field.real(k)
    return total
