"""
Diagnósticos dinámicos: sucesión diagonal c̃_{n,n}, cota de explosión,
clasificación por umbrales, condición de cuasiperiodicidad y estimación
de la amplitud crítica A*.
"""
import logging
import math
from fractions import Fraction
from math import comb
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, model_validator
from scipy import stats

from ..guards import DomainError, power_required, truncation_required
from ..runtime import RUN_CONFIG, cached_coefficients
from .lattice import FrequencyVector
from .sequences import ModeSequence, ShellArrays
from .solver import rescale, solve_shells
from .verifier import prove_periodic

logger = logging.getLogger(__name__)

__all__ = [
    "ClassificationResult", "diagonal_sequence", "blowup_bound_check", "classify_monochromatic",
    "quasiperiodic_bound", "estimate_Astar", "rescale", "unit_shells",
]

Regime = Literal["certified_periodic", "certified_blowup", "sufficient_small_data", "undetermined"]

# Umbrales del caso monocromático p = 2 (en unidades de ω²)
BLOWUP_RATIO = 6
PERIODIC_RATIO = 3
SMALL_DATA_RATIO = Fraction(1, 4)
PERIODIC_CERTIFICATE = {"A": 3.0, "omega": 1.0, "N": 110, "r": 32.0}

# --- Schemas ---

class ClassificationResult(BaseModel):
    regime: Regime
    threshold_used: float
    blowup_time_bound: Optional[float] = None
    period: Optional[float] = None
    sufficient_small_data: bool = False
    ratio: float
    note: str = ""
    certificate: Optional[dict] = None

    @model_validator(mode="after")
    def _blowup_time(self):
        if self.regime == "certified_blowup" and self.blowup_time_bound is None:
            raise ValueError("certified_blowup requiere la cota del tiempo de explosión")
        return self

# ================================
# SUCESIÓN DIAGONAL
# ================================

def _diagonal_integers(N: int) -> List[int]:
    """e_n = c̃_{n,n}·n!(n-1)!

    Con Nar(m,k) = C(m,k)C(m,k-1)/m (números de Narayana) la recursión queda
    e_n = Σ_k Nar(n-1,k)·e_k·e_{n-k}, toda en enteros.
    """
    e = [0, 1]
    for n in range(2, N + 1):
        m = n - 1
        total = 0
        for k in range(1, n):
            total += comb(m, k) * comb(m, k - 1) // m * e[k] * e[n - k]
        e.append(total)
    return e


def _diagonal_weight(n: int) -> int:
    return math.factorial(n) * math.factorial(n - 1)


def diagonal_sequence(N: int, exact: bool = True) -> List:
    """c̃_{1,1}=1; c̃_{n,n} = Σ_{k=1}^{n-1} c̃_{k,k} c̃_{n-k,n-k} / (n² - n)"""
    truncation_required(N)
    e = _diagonal_integers(N)
    values = [Fraction(e[n], _diagonal_weight(n)) for n in range(1, N + 1)]
    if exact:
        return values
    return [float(v) for v in values]


def blowup_bound_check(N: int) -> bool:
    """c̃_{n,n} ≥ 6n/6ⁿ para todo n ≤ N (comparación entera exacta)"""
    truncation_required(N)
    e = _diagonal_integers(N)
    for n in range(1, N + 1):
        # e_n / (n!(n-1)!) ≥ 6n / 6^n
        if e[n] * 6 ** n < 6 * n * _diagonal_weight(n):
            logger.warning(f"La cota de explosión falla en n={n}")
            return False
    return True

# ================================
# CLASIFICACIÓN
# ================================

def quasiperiodic_bound(p: int, omega) -> Tuple[float, float]:
    """(umbral, r₀) con r₀ = (‖ω‖²(p-1)/2)^{1/(p-1)} y umbral = (p-1)/p·r₀"""
    power_required(p)
    omega = FrequencyVector.of(omega)
    r0 = (omega.norm_sq * (p - 1) / 2) ** (1 / (p - 1))
    return (p - 1) / p * r0, r0


def classify_monochromatic(A, omega, escalate_N: Optional[int] = None,
                           higher_modes: Optional[ModeSequence] = None) -> ClassificationResult:
    """Régimen de u₀ = A·e^{iωx} para p = 2.

    Con ``higher_modes`` (modos n ≥ 2 añadidos al dato) el primer modo sigue
    decidiendo la explosión: la cota diagonal solo depende de A. El
    certificado periódico deja de aplicar y se usa la condición de dato
    pequeño sobre la norma total.
    """
    omega = FrequencyVector.of(omega)
    if omega.d != 1:
        raise DomainError("classify_monochromatic requiere d = 1")
    w2 = omega.norm_sq
    amplitude = abs(complex(A))
    ratio = amplitude / w2
    period = 2 * math.pi / w2

    if amplitude >= BLOWUP_RATIO * w2:
        return ClassificationResult(
            regime="certified_blowup", threshold_used=BLOWUP_RATIO * w2,
            blowup_time_bound=period, ratio=ratio,
            note="c̃_{n,n} ≥ 6n/6ⁿ: la serie de Parseval diverge antes de T* ≤ 2π/ω²",
        )

    if higher_modes is not None and len(higher_modes):
        threshold, _ = quasiperiodic_bound(2, omega)
        total = amplitude + float(higher_modes.without((1,)).norm())
        small = total <= threshold
        return ClassificationResult(
            regime="sufficient_small_data" if small else "undetermined",
            threshold_used=threshold, ratio=ratio, sufficient_small_data=small,
            period=period if small else None,
            note="dato general: explosión decidida por el primer modo, periodicidad por ‖φ‖",
        )

    small = ratio <= SMALL_DATA_RATIO
    if amplitude <= PERIODIC_RATIO * w2:
        return ClassificationResult(
            regime="certified_periodic", threshold_used=PERIODIC_RATIO * w2, period=period,
            sufficient_small_data=small, ratio=ratio,
            note=f"certificado monocromático |A|/ω² ≤ 3 (N={PERIODIC_CERTIFICATE['N']}, r={PERIODIC_CERTIFICATE['r']})",
            certificate=dict(PERIODIC_CERTIFICATE),
        )

    if escalate_N is not None:
        logger.info(f"Escalando a prove_periodic con N={escalate_N}")
        report = prove_periodic(A, omega, escalate_N)
        if report.verdict == "certified":
            return ClassificationResult(
                regime="certified_periodic", threshold_used=amplitude, period=period, ratio=ratio,
                note="certificado calculado en esta ejecución",
                certificate=report.model_dump(mode="json", exclude={"timing"}),
            )
        return ClassificationResult(
            regime="undetermined", threshold_used=PERIODIC_RATIO * w2, ratio=ratio,
            note=f"prove_periodic inconcluso con N={escalate_N}",
            certificate=report.model_dump(mode="json", exclude={"timing"}),
        )

    return ClassificationResult(regime="undetermined", threshold_used=PERIODIC_RATIO * w2, ratio=ratio,
                                note="|A|/ω² entre 3 y 6")

# ================================
# ESTIMACIÓN DE A*
# ================================

# Las filas se calculan para φ = {1: 4}, es decir 4ⁿ·c̃, y la pendiente se corrige con ln 4
_ROW_SCALE = 4.0


@cached_coefficients("unit_shells")
def unit_shells(N: int, fft: bool = False, amplitude: float = 1.0) -> ShellArrays:
    """Capas densas de c(amplitude, 1) en f64"""
    return solve_shells({1: complex(amplitude)}, 2, 1.0, N, fft=fft)


def estimate_Astar(n_min: int, n_max: int, fft: Optional[bool] = None,
                   N: Optional[int] = None) -> Tuple[float, float]:
    """Ajuste lineal de ln S_n frente a n; A* = e^{-pendiente}, devuelve (A*, R²)

    ``N`` fija cuántas capas se calculan (y se guardan en cache); el ajuste
    solo usa n_min..n_max.
    """
    if n_min < 2 or n_min >= n_max:
        raise DomainError(f"Se requiere 2 ≤ n_min < n_max (recibido {n_min}, {n_max})")
    N = n_max if N is None else N
    if N < n_max:
        raise DomainError(f"N = {N} no alcanza la capa n_max = {n_max}")
    if fft is None:
        fft = n_max >= RUN_CONFIG['fft_threshold']
    logger.info(f"estimate_Astar: capas {n_min}..{n_max}, fft={fft}")
    shells = unit_shells(N, fft=fft, amplitude=_ROW_SCALE)
    sums = shells.row_sums()[n_min - 1:n_max]
    if not np.all(np.isfinite(sums)) or np.any(sums <= 0):
        raise DomainError("Alguna suma S_n es nula o no finita; no se puede ajustar")
    n = np.arange(n_min, n_max + 1, dtype=np.float64)
    fit = stats.linregress(n, np.log(sums))
    slope = fit.slope - math.log(_ROW_SCALE)
    a_star = math.exp(-slope)
    r_squared = fit.rvalue ** 2
    logger.info(f"A* ≈ {a_star:.6f} (R² = {r_squared:.8f})")
    return a_star, r_squared
