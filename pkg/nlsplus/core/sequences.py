"""
Secuencias de modos a = (a_n) y secuencias espacio-temporales c = (c_{n,j})
sobre un campo escalar, con normas ponderadas ℓ¹ y convoluciones.

Almacenamiento disperso (dict) para cualquier d; ``ShellArrays`` guarda las
capas densas n ≤ j ≤ n² del caso d = 1 en arreglos numpy complex128.
"""
import logging
from collections import defaultdict
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..guards import DomainError, power_required, same_dimension_required
from . import lattice
from .intervals import ComplexInterval, Interval
from .lattice import FrequencyVector, MultiIndex
from .scalars import ScalarField, get_field

logger = logging.getLogger(__name__)


def _weight(n: MultiIndex, s: float):
    """(1 + |n|)^s, exacto si s es entero"""
    if s == 0:
        return 1
    base = 1 + lattice.norm1(n)
    if float(s).is_integer():
        return base ** int(s)
    return float(base) ** s


def _key(n) -> MultiIndex:
    return (n,) if isinstance(n, int) else tuple(n)


def _weighted_sum(field: ScalarField, terms) -> object:
    total = None
    for w, value in terms:
        m = field.modulus(value)
        term = m if w == 1 else m * w
        total = term if total is None else total + term
    return field.modulus(field.zero()) if total is None else total


# ================================
# SECUENCIAS DE MODOS
# ================================

class ModeSequence:
    """a : ℕ₀^d → campo, soporte finito"""

    __slots__ = ("d", "s", "field", "_entries")

    def __init__(self, d: int, entries: Optional[Dict] = None, s: float = 0.0, field=None):
        self.d = d
        self.s = s
        self.field = get_field(field)
        self._entries: Dict[MultiIndex, object] = {}
        for n, value in (entries or {}).items():
            n = lattice.make_index(n)
            if len(n) != d:
                raise DomainError(f"Modo {n} no tiene dimensión {d}")
            value = self.field.coerce(value)
            if not self.field.is_zero(value):
                self._entries[n] = value

    @property
    def entries(self) -> Dict[MultiIndex, object]:
        return self._entries

    def get(self, n: MultiIndex):
        return self._entries.get(_key(n), self.field.zero())

    def items(self) -> List[Tuple[MultiIndex, object]]:
        return sorted(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, n) -> bool:
        return _key(n) in self._entries

    def norm(self):
        return mode_norm(self)

    def without(self, n: MultiIndex) -> "ModeSequence":
        entries = {k: v for k, v in self._entries.items() if k != tuple(n)}
        return ModeSequence(self.d, entries, self.s, self.field)

    def __repr__(self) -> str:
        return f"ModeSequence(d={self.d}, field={self.field.name}, entries={len(self)})"


def mode_norm(a: ModeSequence):
    """‖a‖ = Σ (1+|n|)^s |a_n|"""
    return _weighted_sum(a.field, ((_weight(n, a.s), v) for n, v in a.items()))


def mode_product(a: ModeSequence, b: ModeSequence) -> ModeSequence:
    """(a*b)_n = Σ_{m ≤ n} a_m b_{n-m}"""
    same_dimension_required(a.d, b.d)
    if a.field is not b.field:
        raise DomainError("Secuencias sobre campos distintos")
    field = a.field
    acc: Dict[MultiIndex, object] = {}
    for m, x in a.items():
        for k, y in b.items():
            n = lattice.add(m, k)
            acc[n] = acc[n] + x * y if n in acc else x * y
    return ModeSequence(a.d, acc, a.s, field)


def mode_power(a: ModeSequence, p: int) -> ModeSequence:
    power_required(p)
    result = a
    for _ in range(p - 1):
        result = mode_product(result, a)
    return result


# ================================
# SECUENCIAS ESPACIO-TEMPORALES
# ================================

class SpaceTimeSequence:
    """c : X → campo con X = {(n, j) : n ≤ j ≤ n²}"""

    __slots__ = ("d", "s", "field", "omega", "_entries")

    def __init__(self, d: int, entries: Optional[Dict] = None, s: float = 0.0, field=None,
                 check: bool = True, omega=None):
        self.d = d
        self.s = s
        self.field = get_field(field)
        self.omega: Optional[FrequencyVector] = None if omega is None else FrequencyVector.of(omega)
        if self.omega is not None and self.omega.d != d:
            raise DomainError(f"ω tiene dimensión {self.omega.d} y la secuencia {d}")
        self._entries: Dict[Tuple[MultiIndex, MultiIndex], object] = {}
        for (n, j), value in (entries or {}).items():
            if check:
                n = lattice.make_index(n)
                j = lattice.make_index(j)
                if len(n) != d or len(j) != d:
                    raise DomainError(f"Índice ({n}, {j}) no tiene dimensión {d}")
                if not (lattice.le(n, j) and lattice.le(j, lattice.square(n))):
                    raise DomainError(f"El índice ({n}, {j}) está fuera de X (n ≤ j ≤ n²)")
                value = self.field.coerce(value)
            if not self.field.is_zero(value):
                self._entries[(n, j)] = value

    @property
    def entries(self) -> Dict[Tuple[MultiIndex, MultiIndex], object]:
        return self._entries

    def get(self, n: MultiIndex, j: MultiIndex):
        return self._entries.get((tuple(n), tuple(j)), self.field.zero())

    def items(self) -> List[Tuple[Tuple[MultiIndex, MultiIndex], object]]:
        return sorted(self._entries.items())

    def __len__(self) -> int:
        return len(self._entries)

    def shells(self) -> Dict[MultiIndex, Dict[MultiIndex, object]]:
        grouped: Dict[MultiIndex, Dict[MultiIndex, object]] = defaultdict(dict)
        for (n, j), value in self.items():
            grouped[n][j] = value
        return dict(grouped)

    def max_shell(self) -> int:
        return max((max(n) for n, _ in self._entries), default=0)

    def filtered(self, keep: Callable[[MultiIndex, MultiIndex], bool]) -> "SpaceTimeSequence":
        entries = {k: v for k, v in self._entries.items() if keep(*k)}
        return SpaceTimeSequence(self.d, entries, self.s, self.field, check=False, omega=self.omega)

    def map_values(self, func, omega=None) -> "SpaceTimeSequence":
        entries = {k: func(k[0], k[1], v) for k, v in self._entries.items()}
        return SpaceTimeSequence(self.d, entries, self.s, self.field, check=False,
                                 omega=self.omega if omega is None else omega)

    def _check_compatible(self, other: "SpaceTimeSequence") -> None:
        same_dimension_required(self.d, other.d)
        if self.field is not other.field:
            raise DomainError("Secuencias sobre campos distintos")
        if self.omega is not None and other.omega is not None and self.omega.values != other.omega.values:
            raise DomainError(f"Secuencias con ω distintos: {self.omega.values} y {other.omega.values}")

    def __add__(self, other: "SpaceTimeSequence") -> "SpaceTimeSequence":
        self._check_compatible(other)
        acc = dict(self._entries)
        for key, value in other._entries.items():
            acc[key] = acc[key] + value if key in acc else value
        return SpaceTimeSequence(self.d, acc, self.s, self.field, check=False, omega=_common_omega(self, other))

    def __neg__(self) -> "SpaceTimeSequence":
        return SpaceTimeSequence(self.d, {k: -v for k, v in self._entries.items()}, self.s, self.field,
                                 check=False, omega=self.omega)

    def __sub__(self, other: "SpaceTimeSequence") -> "SpaceTimeSequence":
        return self + (-other)

    def norm(self):
        return st_norm(self)

    def initial_data(self) -> ModeSequence:
        """φ_n = Σ_j c_{n,j} (la solución evaluada en t = 0)"""
        acc: Dict[MultiIndex, object] = {}
        for (n, _), value in self.items():
            acc[n] = acc[n] + value if n in acc else value
        return ModeSequence(self.d, acc, self.s, self.field)

    def to_payload(self) -> dict:
        rows = []
        for (n, j), value in self.items():
            re, im = self.field.to_pair(value)
            rows.append({"n": list(n), "j": list(j), "re": re, "im": im})
        payload = {"d": self.d, "s": self.s, "scalar": self.field.name, "entries": rows}
        if self.omega is not None:
            payload["omega"] = list(self.omega.values)
        return payload

    @classmethod
    def from_payload(cls, payload: dict, field=None) -> "SpaceTimeSequence":
        """Lee el esquema JSON de coeficientes; intervalos [lo, hi] se aceptan en re/im"""
        field = get_field(field or payload.get("scalar", "f64"))
        d = int(payload["d"])
        entries = {}
        for row in payload["entries"]:
            entries[(tuple(row["n"]), tuple(row["j"]))] = _payload_value(field, row["re"], row["im"])
        return cls(d, entries, float(payload.get("s", 0.0)), field, omega=payload.get("omega"))

    def __repr__(self) -> str:
        return f"SpaceTimeSequence(d={self.d}, field={self.field.name}, entries={len(self)})"


def _payload_value(field: ScalarField, re, im):
    if isinstance(re, list) or isinstance(im, list):
        re_iv = Interval(float(re[0]), float(re[1])) if isinstance(re, list) else Interval.from_value(re)
        im_iv = Interval(float(im[0]), float(im[1])) if isinstance(im, list) else Interval.from_value(im)
        return field.coerce(ComplexInterval(re_iv, im_iv))
    return field.coerce((re, im))


def _common_omega(a: SpaceTimeSequence, b: SpaceTimeSequence) -> Optional[FrequencyVector]:
    return a.omega if a.omega is not None else b.omega


def st_norm(c: SpaceTimeSequence):
    """‖c‖ = Σ_{(n,j)} (1+|n|)^s |c_{n,j}|"""
    return _weighted_sum(c.field, ((_weight(n, c.s), v) for (n, _), v in c.items()))


def st_product(c: SpaceTimeSequence, e: SpaceTimeSequence) -> SpaceTimeSequence:
    """(c*e)_{n,j} = Σ c_{n₁,j₁} e_{n₂,j₂} sobre n₁+n₂ = n, j₁+j₂ = j"""
    c._check_compatible(e)
    left = c.shells()
    right = e.shells()
    acc: Dict[Tuple[MultiIndex, MultiIndex], object] = {}
    for n1, row1 in left.items():
        for n2, row2 in right.items():
            n = lattice.add(n1, n2)
            for j1, x in row1.items():
                for j2, y in row2.items():
                    key = (n, lattice.add(j1, j2))
                    acc[key] = acc[key] + x * y if key in acc else x * y
    return SpaceTimeSequence(c.d, acc, c.s, c.field, check=False, omega=_common_omega(c, e))


def st_power(c: SpaceTimeSequence, p: int) -> SpaceTimeSequence:
    power_required(p)
    result = c
    for _ in range(p - 1):
        result = st_product(result, c)
    return result


# ================================
# CAPAS DENSAS (d = 1)
# ================================

def shell_length(n: int) -> int:
    return n * n - n + 1


class ShellArrays:
    """Capas densas c_{n, n..n²} para d = 1; shells[n][j - n]"""

    def __init__(self, shells: List[Optional[np.ndarray]]):
        self.shells = shells

    @classmethod
    def empty(cls, N: int) -> "ShellArrays":
        return cls([None] + [np.zeros(shell_length(n), dtype=np.complex128) for n in range(1, N + 1)])

    @property
    def N(self) -> int:
        return len(self.shells) - 1

    def __iter__(self) -> Iterator[Tuple[int, np.ndarray]]:
        for n in range(1, self.N + 1):
            yield n, self.shells[n]

    def entry(self, n: int, j: int) -> complex:
        if n < 1 or n > self.N or not (n <= j <= n * n):
            return 0j
        return complex(self.shells[n][j - n])

    def row_sums(self) -> np.ndarray:
        """S_n = Σ_j |c_{n,j}| para n = 1..N"""
        return np.array([np.sum(np.abs(row)) for _, row in self], dtype=np.float64)

    def scaled(self, factors: np.ndarray) -> "ShellArrays":
        """Multiplica la capa n por factors[n-1]"""
        return ShellArrays([None] + [row * factors[n - 1] for n, row in self])

    def to_sequence(self, s: float = 0.0, omega=None) -> SpaceTimeSequence:
        entries = {}
        for n, row in self:
            for offset in np.flatnonzero(row):
                entries[((n,), (n + int(offset),))] = complex(row[offset])
        return SpaceTimeSequence(1, entries, s, "f64", check=False, omega=omega)

    @classmethod
    def from_sequence(cls, c: SpaceTimeSequence, N: Optional[int] = None) -> "ShellArrays":
        if c.d != 1:
            raise DomainError("ShellArrays solo representa secuencias con d = 1")
        N = c.max_shell() if N is None else N
        arrays = cls.empty(N)
        for ((n,), (j,)), value in c.items():
            if n <= N:
                arrays.shells[n][j - n] = c.field.to_complex(value)
        return arrays
