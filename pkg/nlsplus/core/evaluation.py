"""
Evaluación de soluciones a partir de sus coeficientes, mallas para
gráficas, el oráculo de Galerkin (RK4) y diagnósticos de explosión.
"""
import cmath
import itertools
import logging
import math
from typing import Dict, List, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, field_validator, model_validator

from ..guards import DivergenceError, DomainError, one_dimensional_required, power_required, truncation_required
from ..runtime import parallel_map
from . import lattice
from .lattice import FrequencyVector
from .scalars import weight
from .sequences import ModeSequence, ShellArrays, SpaceTimeSequence, mode_power
from .solver import CoefficientTrajectory

logger = logging.getLogger(__name__)

# Columnas por bloque al evaluar la malla (acota la memoria de las matrices de fase)
_CHUNK = 4096

# --- Schemas ---

class GridSpec(BaseModel):
    """Malla producto t × x; x_min/x_max/nx tienen una entrada por dimensión"""

    t_min: float
    t_max: float
    nt: int
    x_min: List[float]
    x_max: List[float]
    nx: List[int]

    @field_validator("nt")
    @classmethod
    def _time_count(cls, nt: int) -> int:
        if nt < 2:
            raise ValueError(f"nt debe ser ≥ 2 (recibido {nt})")
        return nt

    @model_validator(mode="after")
    def _ranges(self):
        if self.t_max <= self.t_min:
            raise ValueError("El rango temporal es degenerado")
        if not (len(self.x_min) == len(self.x_max) == len(self.nx)) or not self.nx:
            raise ValueError("x_min, x_max y nx deben tener la misma longitud ≥ 1")
        for lo, hi, count in zip(self.x_min, self.x_max, self.nx):
            if hi <= lo:
                raise ValueError(f"Rango espacial degenerado [{lo}, {hi}]")
            if count < 2:
                raise ValueError(f"Cada eje espacial necesita ≥ 2 puntos (recibido {count})")
        return self

    @property
    def d(self) -> int:
        return len(self.nx)

    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.nt)

    def points(self) -> np.ndarray:
        """Puntos espaciales (P, d), el último eje varía más rápido"""
        axes = [np.linspace(lo, hi, k) for lo, hi, k in zip(self.x_min, self.x_max, self.nx)]
        return np.array(list(itertools.product(*axes)), dtype=np.float64).reshape(-1, self.d)

# ================================
# EVALUACIÓN DE LA SERIE
# ================================

def _as_point(x, d: int) -> tuple:
    if isinstance(x, (int, float)):
        x = (x,)
    x = tuple(float(v) for v in x)
    if len(x) != d:
        raise DomainError(f"x tiene dimensión {len(x)} y la secuencia dimensión {d}")
    return x


def eval_solution(c: SpaceTimeSequence, omega, t: float, x) -> complex:
    """u(t,x) = Σ c_{n,j} e^{iω²·j t} e^{iω·n x}"""
    omega = FrequencyVector.of(omega)
    if omega.d != c.d:
        raise DomainError(f"ω tiene dimensión {omega.d} y c dimensión {c.d}")
    x = _as_point(x, c.d)
    total = 0j
    for (n, j), value in c.items():
        phase = omega.weighted_dot(j) * t + sum(w * k * xi for w, k, xi in zip(omega.values, n, x))
        total += c.field.to_complex(value) * cmath.exp(1j * phase)
    return total


def _frequencies(c: SpaceTimeSequence, omega: FrequencyVector):
    items = c.items()
    values = np.array([c.field.to_complex(v) for _, v in items], dtype=np.complex128)
    temporal = np.array([omega.weighted_dot(j) for (_, j), _ in items], dtype=np.float64)
    spatial = np.array([[w * k for w, k in zip(omega.values, n)] for (n, _), _ in items],
                       dtype=np.float64).reshape(-1, c.d)
    return values, temporal, spatial


def _evaluate_block(times: np.ndarray, points: np.ndarray, values, temporal, spatial) -> np.ndarray:
    out = np.zeros((times.size, points.shape[0]), dtype=np.complex128)
    for start in range(0, values.size, _CHUNK):
        stop = start + _CHUNK
        left = np.exp(1j * np.outer(times, temporal[start:stop])) * values[start:stop]
        right = np.exp(1j * (spatial[start:stop] @ points.T))
        out += left @ right
    return out


def emit_grid(c: SpaceTimeSequence, omega, grid: GridSpec) -> pd.DataFrame:
    """Filas (t, x, re, im, abs) con t exterior y x interior"""
    omega = FrequencyVector.of(omega)
    if omega.d != c.d or grid.d != c.d:
        raise DomainError(f"Dimensiones incompatibles: c={c.d}, ω={omega.d}, malla={grid.d}")
    times = grid.times()
    points = grid.points()
    values, temporal, spatial = _frequencies(c, omega)
    logger.info(f"emit_grid: {len(values)} coeficientes sobre {times.size}×{points.shape[0]} puntos")

    blocks = np.array_split(times, min(times.size, 16))
    parts = parallel_map(lambda ts: _evaluate_block(ts, points, values, temporal, spatial), blocks)
    u = np.vstack(parts).reshape(-1)

    frame = {"t": np.repeat(times, points.shape[0])}
    if c.d == 1:
        frame["x"] = np.tile(points[:, 0], times.size)
    else:
        for k in range(c.d):
            frame[f"x{k + 1}"] = np.tile(points[:, k], times.size)
    frame.update({"re": u.real, "im": u.imag, "abs": np.abs(u)})
    return pd.DataFrame(frame)

# ================================
# ORÁCULO DE GALERKIN
# ================================

def galerkin_rhs(a: ModeSequence, omega, p: int, N: int) -> ModeSequence:
    """ȧ_n = iω²n²a_n - i(a^p)_n para max(n) ≤ N"""
    power_required(p)
    truncation_required(N)
    omega = FrequencyVector.of(omega)
    if omega.d != a.d:
        raise DomainError(f"ω tiene dimensión {omega.d} y a dimensión {a.d}")
    field = a.field
    i = field.coerce((0, 1))
    out: Dict = {}
    for n, value in a.items():
        if max(n) <= N:
            out[n] = i * weight(field, omega, lattice.square(n)) * value
    for n, value in mode_power(a, p).items():
        if max(n) > N:
            continue
        term = i * value
        out[n] = out[n] - term if n in out else -term
    return ModeSequence(a.d, out, a.s, field)


def _dense_rhs(state: np.ndarray, linear: np.ndarray, p: int) -> np.ndarray:
    size = state.size
    power = state
    for _ in range(p - 1):
        power = np.convolve(power, state)[:size]
    return 1j * linear * state - 1j * power


def _initial_state(phi, N: int) -> np.ndarray:
    if isinstance(phi, ModeSequence):
        one_dimensional_required(phi.d, "integrate_galerkin")
        phi = {n[0]: phi.field.to_complex(v) for n, v in phi.items()}
    state = np.zeros(N + 1, dtype=np.complex128)
    for n, value in phi.items():
        n = int(n[0]) if isinstance(n, tuple) else int(n)
        if n < 0 or n > N:
            raise DomainError(f"El modo {n} de φ no está en 0..{N}")
        state[n] = complex(value)
    return state


def integrate_galerkin(phi, omega, p: int, N: int, t_end: float, dt: float) -> CoefficientTrajectory:
    """RK4 de paso fijo sobre el sistema truncado n = 0..N (d = 1)

    La trayectoria guarda cada paso; el último paso se acorta para terminar
    exactamente en t_end.
    """
    power_required(p)
    truncation_required(N)
    omega = FrequencyVector.of(omega)
    one_dimensional_required(omega.d, "integrate_galerkin")
    if dt <= 0:
        raise DomainError(f"dt debe ser positivo (recibido {dt})")
    if t_end < 0:
        raise DomainError(f"t_end debe ser ≥ 0 (recibido {t_end})")

    state = _initial_state(phi, N)
    linear = omega.norm_sq * np.arange(N + 1, dtype=np.float64) ** 2
    steps = max(1, math.ceil(t_end / dt - 1e-9)) if t_end > 0 else 0
    times = np.minimum(np.arange(steps + 1, dtype=np.float64) * dt, t_end)
    samples = np.zeros((N + 1, steps + 1), dtype=np.complex128)
    samples[:, 0] = state
    logger.info(f"integrate_galerkin: N={N}, p={p}, {steps} pasos de RK4")

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            h = times[k + 1] - times[k]
            k1 = _dense_rhs(state, linear, p)
            k2 = _dense_rhs(state + 0.5 * h * k1, linear, p)
            k3 = _dense_rhs(state + 0.5 * h * k2, linear, p)
            k4 = _dense_rhs(state + h * k3, linear, p)
            state = state + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(state)):
                last = float(times[k])
                logger.warning(f"integrate_galerkin: estado no finito después de t={last}")
                raise DivergenceError(f"El integrador diverge después de t = {last}", last)
            samples[:, k + 1] = state

    modes = [(n,) for n in range(N + 1)]
    return CoefficientTrajectory(times, modes, samples,
                                 meta={"method": "rk4", "N": N, "p": p, "dt": dt, "t_end": t_end})

# ================================
# DIAGNÓSTICOS
# ================================

def conserved_V(z: complex, p: int) -> float:
    """V(z) = z^{-(p-1)} + z̄^{-(p-1)} = 2·Re(z^{-(p-1)})"""
    power_required(p)
    z = complex(z)
    if z == 0:
        raise DomainError("V no está definido en z = 0")
    return 2.0 * (z ** -(p - 1)).real


def _scaled_rows(ctilde: Union[SpaceTimeSequence, ShellArrays], A, omega, M: int, p: int) -> List[np.ndarray]:
    """Capas 1..M de c(A, ω) = A^n/ω^{2(n-1)/(p-1)}·c̃ en complex128"""
    truncation_required(M)
    omega = FrequencyVector.of(omega)
    one_dimensional_required(omega.d, "partial_l2")
    shells = ctilde if isinstance(ctilde, ShellArrays) else ShellArrays.from_sequence(ctilde)
    if shells.N < M:
        raise DomainError(f"c̃ solo tiene {shells.N} capas y se pidieron {M}")
    amplitude = complex(A)
    w = omega.values[0]
    rows = []
    for n in range(1, M + 1):
        factor = amplitude ** n / w ** (2 * (n - 1) / (p - 1))
        rows.append(shells.shells[n] * factor)
    return rows


def partial_l2(ctilde, A, omega, M: int, t: float, p: int = 2) -> float:
    """Σ_{n ≤ M} |a_n(t)|² con a_n(t) = Σ_j c_{n,j} e^{iω²jt}"""
    rows = _scaled_rows(ctilde, A, omega, M, p)
    w2 = FrequencyVector.of(omega).norm_sq
    total = 0.0
    for n, row in enumerate(rows, start=1):
        j = np.arange(n, n * n + 1, dtype=np.float64)
        total += abs(np.sum(row * np.exp(1j * w2 * j * t))) ** 2
    return float(total)


def time_averaged_l2(ctilde, A, omega, M: int, p: int = 2) -> float:
    """Promedio en un período de partial_l2: Σ_{n ≤ M} Σ_j |c_{n,j}|²"""
    rows = _scaled_rows(ctilde, A, omega, M, p)
    return float(sum(np.sum(np.abs(row) ** 2) for row in rows))
