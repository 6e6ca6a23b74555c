"""
Multi-índices en ℕ₀^d y vectores de frecuencia.

Un multi-índice es una tupla de enteros no negativos; el orden parcial es
componente a componente y |n| es la suma de componentes.
"""
from itertools import product
from math import pi
from typing import Iterator, List, Tuple, Union

from pydantic import BaseModel, field_validator

from ..guards import DomainError, non_negative_index_required, positive_omega_required, same_dimension_required

MultiIndex = Tuple[int, ...]


def make_index(entries) -> MultiIndex:
    if isinstance(entries, int):
        entries = (entries,)
    return non_negative_index_required(entries)


def norm1(n: MultiIndex) -> int:
    return sum(n)


def le(n: MultiIndex, m: MultiIndex) -> bool:
    same_dimension_required(len(n), len(m))
    return all(a <= b for a, b in zip(n, m))


def lt(n: MultiIndex, m: MultiIndex) -> bool:
    """Orden estricto: n ≤ m en todas las componentes y n ≠ m"""
    return le(n, m) and n != m


def strictly_below(n: MultiIndex, m: MultiIndex) -> bool:
    """n_i < m_i en todas las componentes"""
    same_dimension_required(len(n), len(m))
    return all(a < b for a, b in zip(n, m))


def add(n: MultiIndex, m: MultiIndex) -> MultiIndex:
    same_dimension_required(len(n), len(m))
    return tuple(a + b for a, b in zip(n, m))


def sub(n: MultiIndex, m: MultiIndex) -> MultiIndex:
    same_dimension_required(len(n), len(m))
    out = tuple(a - b for a, b in zip(n, m))
    if any(e < 0 for e in out):
        raise DomainError(f"La resta {n} - {m} sale de ℕ₀^d")
    return out


def square(n: MultiIndex) -> MultiIndex:
    return tuple(a * a for a in n)


def box(d: int, lower: int, upper: int) -> Iterator[MultiIndex]:
    """Multi-índices con lower ≤ n_i ≤ upper, ordenados por (|n|, lexicográfico)"""
    cells = product(range(lower, upper + 1), repeat=d)
    return iter(sorted(cells, key=lambda n: (sum(n), n)))


def band_upper(n: MultiIndex, p: int) -> MultiIndex:
    """Cota superior del soporte de (c^p)_n: n² - (p-1)(2n - p)"""
    return tuple(a * a - (p - 1) * (2 * a - p) for a in n)


def in_band(n: MultiIndex, j: MultiIndex, p: int) -> bool:
    """p ≤ n y n ≤ j ≤ n² - (p-1)(2n-p), componente a componente"""
    if any(a < p for a in n):
        return False
    upper = band_upper(n, p)
    return all(a <= b <= u for a, b, u in zip(n, j, upper))


# ----------------------
# Frecuencias
# ----------------------

class FrequencyVector(BaseModel):
    """ω ∈ (0,∞)^d; el toro es Π [0, 2π/ω_i]"""

    values: List[float]

    @field_validator("values")
    @classmethod
    def _positive(cls, values: List[float]) -> List[float]:
        return list(positive_omega_required(values))

    @classmethod
    def of(cls, omega: Union["FrequencyVector", float, int, List[float], Tuple[float, ...]]) -> "FrequencyVector":
        if isinstance(omega, FrequencyVector):
            return omega
        if isinstance(omega, (int, float)):
            omega = [omega]
        try:
            return cls(values=list(omega))
        except ValueError as e:
            raise DomainError(f"Vector de frecuencias inválido: {e}") from e

    @property
    def d(self) -> int:
        return len(self.values)

    @property
    def norm_sq(self) -> float:
        """‖ω‖² = Σ ω_i²"""
        return sum(w * w for w in self.values)

    def weighted_dot(self, j: MultiIndex) -> float:
        """ω²·j = Σ ω_i² j_i"""
        same_dimension_required(self.d, len(j))
        return sum(w * w * k for w, k in zip(self.values, j))

    def spatial_phase(self, n: MultiIndex) -> float:
        """ω·n = Σ ω_i n_i"""
        same_dimension_required(self.d, len(n))
        return sum(w * k for w, k in zip(self.values, n))

    def period(self) -> float:
        """Periodo temporal 2π/‖ω‖²"""
        return 2 * pi / self.norm_sq
