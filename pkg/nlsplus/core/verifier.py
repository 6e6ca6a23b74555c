"""
Certificación por polinomio de radios para p = 2, d = 1.

1. Encierro riguroso de ĉ = π_N c(A, ω) con bolas complejas (BallArray).
2. Cotas Y0, Z1, Z2 en aritmética de intervalos.
3. P(r) = Z2·r² - (1 - Z1)·r + Y0; certificado si sup P(r) < 0.

Un veredicto ``certified`` implica un único punto fijo de
T_∞(u) = π_∞ T(ĉ + u) en la bola cerrada de radio r, luego ‖c(A,ω)‖ < ∞ y
una solución 2π/ω²-periódica. ``inconclusive`` es un resultado, no un error.
"""
import hashlib
import logging
import math
import time
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from ..guards import CertificationError, DomainError, truncation_required
from ..runtime import RUN_CONFIG, parallel_map
from .intervals import BallArray, ComplexInterval, Interval, U, inflate
from .lattice import FrequencyVector
from .scalars import QComplex
from .sequences import SpaceTimeSequence, shell_length

logger = logging.getLogger(__name__)

Verdict = Literal["certified", "inconclusive"]

# --- Schemas ---

class RadiiReport(BaseModel):
    """Certificado re-verificable: entradas, cotas y veredicto"""

    A: Tuple[float, float]
    A_exact: Optional[Tuple[str, str]] = None
    omega: float
    p: int = 2
    N: int
    r: float
    Y0: Tuple[float, float]
    Z1: Tuple[float, float]
    Z2: Tuple[float, float]
    Pr: Tuple[float, float]
    verdict: Verdict
    chat_digest: str
    chat_norm: Tuple[float, float]
    root_range: Optional[Tuple[float, float]] = None
    r_candidates: int = 1
    scalar: str = "interval"
    threads: int = 1
    timing: Optional[float] = None


def _iv(pair) -> Interval:
    return Interval(float(pair[0]), float(pair[1]))


def _omega_square(omega: float) -> Interval:
    w = Interval.point(omega)
    return w * w

# ================================
# ENCIERRO DE ĉ
# ================================

@dataclass
class ShellEnclosure:
    """ĉ = π_N c(A, ω) como capas densas de bolas complejas"""

    A: complex
    omega: float
    N: int
    shells: List[Optional[BallArray]]

    def entry(self, n: int, j: int) -> ComplexInterval:
        if not (1 <= n <= self.N and n <= j <= n * n):
            return ComplexInterval.zero()
        return self.shells[n].entry(j - n)

    def row_abs(self) -> List[Interval]:
        """b_n = Σ_j |ĉ_{n,j}|, n = 1..N"""
        return [self.shells[n].sum_abs() for n in range(1, self.N + 1)]

    def norm(self) -> Interval:
        total = Interval(0.0, 0.0)
        for b in self.row_abs():
            total = total + b
        return total

    def digest(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"A={self.A!r};omega={self.omega!r};N={self.N}".encode())
        for n in range(1, self.N + 1):
            self.shells[n].update_digest(digest)
        return digest.hexdigest()

    def to_sequence(self) -> SpaceTimeSequence:
        entries = {}
        for n in range(1, self.N + 1):
            for offset, value in enumerate(self.shells[n].to_intervals()):
                entries[((n,), (n + offset,))] = value
        return SpaceTimeSequence(1, entries, 0.0, "interval", check=False, omega=[self.omega])


def _denominators(omega_sq: Interval, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Encierro de ω²·(n² - j) para j = n..n²-1"""
    m = n * n - np.arange(n, n * n, dtype=np.float64)
    if omega_sq.lo == omega_sq.hi and omega_sq.lo.is_integer() and omega_sq.lo * n * n < 2.0 ** 53:
        exact = omega_sq.lo * m
        return exact, exact
    lo = np.nextafter(omega_sq.lo * m, -np.inf)
    hi = np.nextafter(omega_sq.hi * m, np.inf)
    return lo, hi


def enclose_truncation(A, omega, N: int) -> ShellEnclosure:
    """Recursión p = 2 con bolas: cada coeficiente verdadero queda en su encierro

    A puede ser un complejo de máquina o un QComplex exacto; en ese caso la
    primera capa es una bola que contiene el valor racional.
    """
    truncation_required(N)
    omega = FrequencyVector.of(omega)
    if omega.d != 1:
        raise DomainError("La certificación solo está disponible para d = 1")
    seed = ComplexInterval.from_value(A)
    A = seed.mid()
    w = omega.values[0]
    omega_sq = _omega_square(w)
    started = time.perf_counter()

    shells: List[Optional[BallArray]] = [None] * (N + 1)
    shells[1] = BallArray.from_intervals([seed])
    for n in range(2, N + 1):
        length = shell_length(n)
        pairs = list(range(1, n // 2 + 1))
        work = lambda m: shells[m].convolve(shells[n - m])
        if length >= RUN_CONFIG['parallel_min_length']:
            parts = parallel_map(work, pairs)
        else:
            parts = [work(m) for m in pairs]

        acc_mid = np.zeros(length, dtype=np.complex128)
        acc_rad = np.zeros(length, dtype=np.float64)
        for m, part in zip(pairs, parts):
            if m != n - m:
                part = part.scaled(2.0)
            size = len(part)
            acc_mid[:size] += part.mid
            acc_rad[:size] = inflate(acc_rad[:size] + part.rad + 2 * U * np.abs(acc_mid[:size]), 4)
        square = BallArray(acc_mid, acc_rad)

        dlo, dhi = _denominators(omega_sq, n)
        head = BallArray(square.mid[:-1], square.rad[:-1]).divided_by(dlo, dhi)
        tot_mid, tot_rad = head.total()
        closing = -tot_mid
        closing_rad = float(inflate(tot_rad + 2 * U * abs(closing), 2))
        shells[n] = BallArray(np.append(head.mid, closing), np.append(head.rad, closing_rad))
        if n % 10 == 0:
            logger.info(f"enclose_truncation: capa {n}/{N} ({time.perf_counter() - started:.1f}s)")

    logger.info(f"enclose_truncation: A={A}, ω={w}, N={N} listo en {time.perf_counter() - started:.2f}s")
    return ShellEnclosure(A, w, N, shells)

# ================================
# COTAS Y0, Z1, Z2
# ================================

def compute_Y0(chat: ShellEnclosure, omega, N: int) -> Interval:
    """(1/ω²) Σ_{N+1 ≤ n ≤ 2N} (b*b)_n / (n-1), b_n = Σ_j |ĉ_{n,j}|"""
    if chat.N > N:
        raise DomainError("ĉ tiene capas por encima de N")
    omega_sq = _omega_square(FrequencyVector.of(omega).values[0])
    b = [Interval(0.0, 0.0)] + chat.row_abs() + [Interval(0.0, 0.0)] * (N - chat.N)
    total = Interval(0.0, 0.0)
    for n in range(N + 1, 2 * N + 1):
        conv = Interval(0.0, 0.0)
        for n1 in range(n - N, N + 1):
            conv = conv + b[n1] * b[n - n1]
        total = total + conv / Interval.from_value(n - 1)
    return total / omega_sq


def compute_Z1(chat: ShellEnclosure, omega, N: int) -> Interval:
    """(4/ω²) Σ_{n ≤ N} Σ_j |ĉ_{n,j}| / (n² + 2n(N+1) - j)"""
    if chat.N > N:
        raise DomainError("ĉ tiene capas por encima de N")
    omega_sq = _omega_square(FrequencyVector.of(omega).values[0])
    upper = 0.0
    lower = 0.0
    terms = 0
    for n in range(1, chat.N + 1):
        shell = chat.shells[n]
        den = (n * n + 2 * n * (N + 1)) - np.arange(n, n * n + 1, dtype=np.float64)
        upper = upper + float(np.sum(inflate(shell.abs_upper() / den, 1)))
        lower = lower + float(np.sum(shell.abs_lower() / den))
        terms += len(shell)
    upper = float(inflate(upper, terms + chat.N))
    lower = max(math.nextafter(lower * (1.0 - 2 * (terms + chat.N + 4) * U), -math.inf), 0.0)
    return Interval(lower, upper) * Interval.from_value(4) / omega_sq


def compute_Z2(omega, N: int) -> Interval:
    """Z2 = 2 / (ω²(N+1)²), constante en r"""
    truncation_required(N)
    omega_sq = _omega_square(FrequencyVector.of(omega).values[0])
    return Interval.from_value(2) / (omega_sq * Interval.from_value((N + 1) ** 2))


def radii_polynomial(Y0: Interval, Z1: Interval, Z2: Interval, r: float) -> Interval:
    rr = Interval.point(r)
    return Z2 * rr * rr - (Interval.from_value(1) - Z1) * rr + Y0


def radii_check(Y0: Interval, Z1: Interval, Z2: Interval, r: float) -> Tuple[Verdict, Interval]:
    """certified sii sup P(r) < 0 (y entonces Z1 < 1)"""
    if not r > 0:
        return "inconclusive", Y0
    P = radii_polynomial(Y0, Z1, Z2, r)
    if P.hi < 0 and Z1.hi < 1:
        return "certified", P
    return "inconclusive", P


def root_range(Y0: Interval, Z1: Interval, Z2: Interval) -> Optional[Tuple[float, float]]:
    """[r₋, r₊] garantizado donde P < 0, si el discriminante es positivo"""
    slope = Interval.from_value(1) - Z1
    if slope.lo <= 0:
        return None
    disc = slope * slope - Interval.from_value(4) * Z2 * Y0
    if disc.lo <= 0:
        return None
    root = disc.sqrt()
    two_z2 = Interval.from_value(2) * Z2
    r_minus = (slope - root) / two_z2
    r_plus = (slope + root) / two_z2
    if r_minus.hi >= r_plus.lo:
        return None
    return r_minus.hi, r_plus.lo


def auto_radius(Y0: Interval, Z1: Interval, Z2: Interval) -> Optional[float]:
    """Punto medio de las raíces: el vértice (1 - Z1)/(2·Z2)"""
    slope = Interval.from_value(1) - Z1
    if slope.lo <= 0:
        return None
    vertex = slope / (Interval.from_value(2) * Z2)
    return vertex.mid()


def sweep_radii(Y0: Interval, Z1: Interval, Z2: Interval, count: int = 61) -> List[float]:
    grid = [float(r) for r in np.logspace(-10, 6, count)]
    vertex = auto_radius(Y0, Z1, Z2)
    if vertex is not None:
        grid.append(vertex)
    return grid

# ================================
# PIPELINE
# ================================

def prove_periodic(A, omega, N: int, r: Optional[float] = None, sweep: bool = False) -> RadiiReport:
    """enclose_truncation → Y0/Z1/Z2 → radii_check"""
    started = time.perf_counter()
    omega = FrequencyVector.of(omega)
    w = omega.values[0]
    A_exact = (str(A.re), str(A.im)) if isinstance(A, QComplex) else None
    chat = enclose_truncation(A, omega, N)
    A = chat.A
    Y0 = compute_Y0(chat, omega, N)
    Z1 = compute_Z1(chat, omega, N)
    Z2 = compute_Z2(omega, N)
    logger.info(f"Cotas: Y0 ≤ {Y0.hi:.6e}, Z1 ≤ {Z1.hi:.6e}, Z2 ≤ {Z2.hi:.6e}")

    if r is not None:
        candidates = [float(r)]
    elif sweep:
        candidates = sweep_radii(Y0, Z1, Z2)
    else:
        vertex = auto_radius(Y0, Z1, Z2)
        candidates = [vertex] if vertex is not None else []

    verdict, P, chosen = "inconclusive", Y0, 0.0
    for candidate in candidates:
        verdict, P = radii_check(Y0, Z1, Z2, candidate)
        chosen = candidate
        if verdict == "certified":
            break

    elapsed = time.perf_counter() - started
    if verdict == "certified":
        logger.info(f"✅ Certificado: A={A}, ω={w}, N={N}, r={chosen}, P(r) ≤ {P.hi:.6e}")
    else:
        logger.warning(f"Inconcluso: A={A}, ω={w}, N={N} ({len(candidates)} radios probados)")

    return RadiiReport(
        A=(A.real, A.imag), A_exact=A_exact, omega=w, N=N, r=chosen,
        Y0=Y0.to_pair(), Z1=Z1.to_pair(), Z2=Z2.to_pair(), Pr=P.to_pair(),
        verdict=verdict, chat_digest=chat.digest(), chat_norm=chat.norm().to_pair(),
        root_range=root_range(Y0, Z1, Z2), r_candidates=len(candidates),
        threads=RUN_CONFIG['threads'], timing=elapsed,
    )


def recheck_report(report: RadiiReport) -> Tuple[Verdict, Interval]:
    """Vuelve a evaluar radii_check con las cotas guardadas"""
    if report.p != 2:
        raise CertificationError("Solo se re-verifican certificados con p = 2")
    return radii_check(_iv(report.Y0), _iv(report.Z1), _iv(report.Z2), report.r)
