"""
Construcción de los coeficientes c_{n,j}.

* ``solve_spacetime``: recursión capa por capa en |n| creciente,
  c_{n,j} = (c^p)_{n,j} / (ω²·(n² - j)) para j ≠ n² y la entrada de cierre
  c_{n,n²} = φ_n - Σ_{k ≠ n²} c_{n,k}.
* ``solve_quadrature``: integración capa por capa de las EDO de los modos
  con factor integrante explícito (admite modo cero φ₀).
* ``zero_mode_solution``: solución cerrada del modo cero.
"""
import cmath
import logging
import time
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.integrate import cumulative_simpson
from scipy.signal import fftconvolve

from ..guards import (
    DomainError,
    SingularityError,
    one_dimensional_required,
    positive_support_required,
    power_required,
    truncation_required,
)
from ..runtime import RUN_CONFIG, cached_coefficients, parallel_map
from . import lattice
from .lattice import FrequencyVector, MultiIndex
from .scalars import ScalarField, get_field, omega_square, weight
from .sequences import ModeSequence, ShellArrays, SpaceTimeSequence, shell_length

logger = logging.getLogger(__name__)

_SINGULAR_TOL = 1e-12

# --- Schemas ---

class ProblemConfig(BaseModel):
    """Problema i·u_t = Δu + u^p en el toro de frecuencias ω con dato φ"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    p: int
    omega: FrequencyVector
    phi: ModeSequence

    @field_validator("p")
    @classmethod
    def _power(cls, p: int) -> int:
        if p < 2:
            raise ValueError(f"p debe ser ≥ 2 (recibido {p})")
        return p

    @model_validator(mode="after")
    def _dimensions(self):
        if self.phi.d != self.omega.d:
            raise ValueError(f"φ tiene dimensión {self.phi.d} y ω dimensión {self.omega.d}")
        return self

    @property
    def d(self) -> int:
        return self.omega.d

    @classmethod
    def build(cls, p: int, omega, phi: Union[ModeSequence, Dict], field=None) -> "ProblemConfig":
        power_required(p)
        omega = FrequencyVector.of(omega)
        if not isinstance(phi, ModeSequence):
            phi = ModeSequence(omega.d, {lattice.make_index(k): v for k, v in phi.items()}, field=field)
        try:
            return cls(p=p, omega=omega, phi=phi)
        except ValueError as e:
            raise DomainError(f"Configuración inválida: {e}") from e


@dataclass
class CoefficientTrajectory:
    """Muestras a_n(t_k) de los modos sobre una malla temporal"""

    time_grid: np.ndarray
    modes: List[MultiIndex]
    samples: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    @property
    def values(self) -> Dict[MultiIndex, np.ndarray]:
        return {n: self.samples[k] for k, n in enumerate(self.modes)}

    def at(self, n) -> np.ndarray:
        n = lattice.make_index(n)
        return self.samples[self.modes.index(n)]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for k, n in enumerate(self.modes):
            label = n[0] if len(n) == 1 else "|".join(str(v) for v in n)
            rows.append(pd.DataFrame({
                "t": self.time_grid,
                "n": label,
                "re": self.samples[k].real,
                "im": self.samples[k].imag,
                "abs": np.abs(self.samples[k]),
            }))
        return pd.concat(rows, ignore_index=True)

# ================================
# MODO CERO
# ================================

def zero_mode_blowup_time(phi0: complex, p: int) -> Optional[float]:
    """Tiempo real t* con 1 + i(p-1)φ₀^{p-1} t* = 0, si existe"""
    power_required(p)
    v = 1j * (p - 1) * complex(phi0) ** (p - 1)
    if v == 0:
        return None
    s0 = -v.real / (abs(v) ** 2)
    if abs(1 + s0 * v) <= _SINGULAR_TOL * max(1.0, abs(s0 * v)):
        return s0
    return None


def _crosses(blowup: Optional[float], t_from: float, t_to: float) -> bool:
    if blowup is None:
        return False
    lo, hi = min(t_from, t_to), max(t_from, t_to)
    return lo <= blowup <= hi


def zero_mode_solution(phi0: complex, p: int, t: float) -> complex:
    """a₀(t) = φ₀ / (1 + i(p-1)φ₀^{p-1} t)^{1/(p-1)}

    El camino 1 + i(p-1)φ₀^{p-1}s, s ∈ [0, t], es un segmento que parte de 1;
    si no pasa por 0 no cruza el semieje real negativo, así que la rama
    continuada coincide con la rama principal.
    """
    phi0 = complex(phi0)
    if phi0 == 0:
        return 0j
    blowup = zero_mode_blowup_time(phi0, p)
    if _crosses(blowup, 0.0, t):
        raise SingularityError(f"La trayectoria del modo cero alcanza la singularidad en t* = {blowup}", blowup)
    z = 1 + 1j * (p - 1) * phi0 ** (p - 1) * t
    return phi0 * cmath.exp(-cmath.log(z) / (p - 1))


def zero_mode_trajectory(phi0: complex, p: int, times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=np.float64)
    phi0 = complex(phi0)
    if phi0 == 0:
        return np.zeros(times.shape, dtype=np.complex128)
    blowup = zero_mode_blowup_time(phi0, p)
    if _crosses(blowup, min(0.0, float(times.min())), max(0.0, float(times.max()))):
        raise SingularityError(f"La malla temporal alcanza la singularidad del modo cero en t* = {blowup}", blowup)
    z = 1 + 1j * (p - 1) * phi0 ** (p - 1) * times
    return phi0 * np.exp(-np.log(z) / (p - 1))

# ================================
# RECURSIÓN ESPACIO-TIEMPO
# ================================

def _check_data(cfg: ProblemConfig) -> None:
    positive_support_required(cfg.phi.entries.keys())


def solve_spacetime(cfg: ProblemConfig, N: int, scalar: Union[str, ScalarField] = "f64") -> SpaceTimeSequence:
    """Coeficientes c_{n,j} para 1 ≤ n ≤ N·1 (capas completas)"""
    truncation_required(N)
    _check_data(cfg)
    field = get_field(scalar)
    started = time.perf_counter()
    if cfg.d == 1 and field.name == "f64":
        phi = {n[0]: complex(v) for n, v in cfg.phi.items()}
        shells = solve_shells(phi, cfg.p, cfg.omega.norm_sq, N)
        result = shells.to_sequence(s=cfg.phi.s, omega=cfg.omega)
    else:
        result = _solve_sparse(cfg, N, field)
    logger.info(f"solve_spacetime: p={cfg.p}, d={cfg.d}, N={N}, escalar={field.name}, "
                f"entradas={len(result)} ({time.perf_counter() - started:.3f}s)")
    return result


def _convolve_rows(field, left: Dict, right: Dict, n: MultiIndex) -> Dict[MultiIndex, object]:
    """Σ_{m₁+m₂=n, m₁,m₂ ≥ 1} left_{m₁} * right_{m₂} sobre el índice temporal"""
    acc: Dict[MultiIndex, object] = {}
    for m1 in sorted(left):
        if not all(a < b for a, b in zip(m1, n)):
            continue
        m2 = tuple(b - a for a, b in zip(m1, n))
        row2 = right.get(m2)
        if not row2:
            continue
        for j1, x in left[m1].items():
            for j2, y in row2.items():
                j = lattice.add(j1, j2)
                acc[j] = acc[j] + x * y if j in acc else x * y
    return {j: v for j, v in acc.items() if not field.is_zero(v)}


def _solve_sparse(cfg: ProblemConfig, N: int, field: ScalarField) -> SpaceTimeSequence:
    p = cfg.p
    phi = {n: field.coerce(v) for n, v in cfg.phi.items()}
    rows: Dict[MultiIndex, Dict[MultiIndex, object]] = {}
    powers: Dict[int, Dict[MultiIndex, Dict]] = {k: {} for k in range(2, p + 1)}

    for n in lattice.box(cfg.d, 1, N):
        for k in range(2, p + 1):
            prev = rows if k == 2 else powers[k - 1]
            row = _convolve_rows(field, rows, prev, n)
            if row:
                powers[k][n] = row
        source = powers[p].get(n, {})
        n2 = lattice.square(n)
        row: Dict[MultiIndex, object] = {}
        closing = phi.get(n, field.zero())
        for j in sorted(source):
            if not lattice.strictly_below(j, n2):
                raise DomainError(f"(c^p) tiene soporte fuera de la banda en ({n}, {j})")
            entry = field.divide(source[j], weight(field, cfg.omega, lattice.sub(n2, j)))
            row[j] = entry
            closing = closing - entry
        if not field.is_zero(closing):
            row[n2] = closing
        row = {j: v for j, v in row.items() if not field.is_zero(v)}
        if row:
            rows[n] = row

    entries = {(n, j): v for n, row in rows.items() for j, v in row.items()}
    return SpaceTimeSequence(cfg.d, entries, cfg.phi.s, field, check=False, omega=cfg.omega)


def convolve_shell(a: np.ndarray, b: np.ndarray, fft: bool = False) -> np.ndarray:
    if fft and min(len(a), len(b)) > 32:
        return fftconvolve(a, b)
    return np.convolve(a, b)


def solve_shells(phi: Dict[int, complex], p: int, omega_sq: float, N: int, fft: bool = False) -> ShellArrays:
    """Recursión densa d = 1 en complex128; phi indexado por n ≥ 1"""
    shells = ShellArrays.empty(N)
    powers = {k: [None] * (N + 1) for k in range(2, p + 1)}

    for n in range(1, N + 1):
        length = shell_length(n)
        for k in range(2, p + 1):
            prev = shells.shells if k == 2 else powers[k - 1]
            if k == 2:
                pairs = [(m, n - m) for m in range(1, n // 2 + 1)]
            else:
                pairs = [(m, n - m) for m in range(1, n)]
            pairs = [(m1, m2) for m1, m2 in pairs if prev[m2] is not None]
            parts = _pair_products(shells.shells, prev, pairs, fft)
            acc = np.zeros(length, dtype=np.complex128)
            for (m1, m2), part in zip(pairs, parts):
                weight_pair = 2.0 if (k == 2 and m1 != m2) else 1.0
                acc[:len(part)] += weight_pair * part
            powers[k][n] = acc
        source = powers[p][n]
        row = shells.shells[n]
        if length > 1:
            denom = omega_sq * (n * n - np.arange(n, n * n, dtype=np.float64))
            row[:-1] = source[:-1] / denom
        row[-1] = complex(phi.get(n, 0)) - row[:-1].sum()
        if n % 25 == 0:
            logger.debug(f"solve_shells: capa {n}/{N}")
    return shells


def _pair_products(left, right, pairs, fft: bool) -> List[np.ndarray]:
    if not pairs:
        return []
    work = lambda pair: convolve_shell(left[pair[0]], right[pair[1]], fft)
    if len(left[pairs[-1][0]]) + len(right[pairs[-1][1]]) >= RUN_CONFIG['parallel_min_length']:
        return parallel_map(work, pairs)
    return [work(pair) for pair in pairs]

# ================================
# CUADRATURA POR CAPAS
# ================================

def _power_at(a: np.ndarray, n: int, p: int) -> np.ndarray:
    """(a^p)_n para cada tiempo; a tiene forma (n+1, M)"""
    current = a
    for step in range(p - 1):
        last = step == p - 2
        indices = [n] if last else range(n + 1)
        nxt = np.zeros_like(a)
        for m in indices:
            nxt[m] = np.sum(current[:m + 1] * a[m::-1], axis=0)
        current = nxt
    return current[n]


def _cumulative(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    re = cumulative_simpson(values.real, x=grid, initial=0)
    im = cumulative_simpson(values.imag, x=grid, initial=0)
    return re + 1j * im


def solve_quadrature(cfg: ProblemConfig, N: int, t_end: float, steps: int = 2000) -> CoefficientTrajectory:
    """a_n(t) = E_n(t)[φ_n + ∫₀ᵗ E_n(s)^{-1} Q_n(s) ds], n = 0..N (d = 1)"""
    one_dimensional_required(cfg.d, "solve_quadrature")
    truncation_required(N)
    if steps < 2:
        raise DomainError(f"Se necesitan al menos 2 pasos de malla (recibido {steps})")
    p = cfg.p
    omega_sq = cfg.omega.norm_sq
    grid = np.linspace(0.0, float(t_end), steps + 1)
    phi = {n[0]: complex(v) for n, v in cfg.phi.items()}
    phi0 = phi.get(0, 0j)

    a = np.zeros((N + 1, grid.size), dtype=np.complex128)
    a[0] = zero_mode_trajectory(phi0, p, grid)
    if phi0 != 0:
        path = 1 + 1j * (p - 1) * phi0 ** (p - 1) * grid
        damping = np.exp(-p * np.log(path) / (p - 1))
    else:
        damping = np.ones(grid.size, dtype=np.complex128)

    for n in range(1, N + 1):
        forcing = -1j * _power_at(a[:n + 1], n, p)
        factor = np.exp(1j * omega_sq * n * n * grid) * damping
        a[n] = factor * (phi.get(n, 0j) + _cumulative(forcing / factor, grid))
        logger.debug(f"solve_quadrature: modo {n}/{N} integrado")

    modes = [(n,) for n in range(N + 1)]
    return CoefficientTrajectory(grid, modes, a, meta={"method": "quadrature", "N": N, "p": p})

# ================================
# CASO MONOCROMÁTICO
# ================================

@cached_coefficients("unit_coefficients")
def unit_coefficients(p: int, N: int, scalar: str = "f64") -> SpaceTimeSequence:
    """c̃ = c(1,1): φ = {1: 1}, ω = 1"""
    cfg = ProblemConfig.build(p, [1.0], {1: 1}, field=scalar)
    return solve_spacetime(cfg, N, scalar)


def rescale(ctilde: SpaceTimeSequence, A, omega, p: int) -> SpaceTimeSequence:
    """c(A,ω)_{n,j} = A^n / ω^{2(n-1)/(p-1)} · c̃_{n,j}"""
    power_required(p)
    omega = FrequencyVector.of(omega)
    one_dimensional_required(omega.d, "rescale")
    field = ctilde.field
    amplitude = field.coerce(A)
    w = omega.values[0]
    factors = {}

    def factor(n: int):
        if n not in factors:
            numerator = amplitude ** n
            exponent = 2 * (n - 1)
            if exponent % (p - 1) == 0:
                e = exponent // (p - 1)
                if e % 2 == 0:
                    divisor = omega_square(field, w) ** (e // 2)
                else:
                    divisor = field.real(w) ** e
            elif field.name == "f64":
                divisor = w ** (exponent / (p - 1))
            else:
                raise DomainError("Reescalado con exponente fraccionario solo en aritmética f64")
            factors[n] = field.divide(numerator, divisor)
        return factors[n]

    return ctilde.map_values(lambda n, j, v: v * factor(n[0]), omega=omega)


def monochromatic_coeffs(A, omega, p: int, N: int, scalar: str = "f64") -> SpaceTimeSequence:
    """c(A,ω) para φ = A·e^{iωx}, calculado como reescalado de c̃"""
    omega = FrequencyVector.of(omega)
    one_dimensional_required(omega.d, "monochromatic_coeffs")
    truncation_required(N)
    field = get_field(scalar)
    ctilde = unit_coefficients(p, N, field.name)
    return rescale(ctilde, A, omega, p)
