"""
Operadores K, L, ι, T y la proyección π_N sobre secuencias espacio-temporales.

T(c) = ιφ + (I - L) K c^p; sus puntos fijos son exactamente los
coeficientes de la recursión.
"""
import logging
from fractions import Fraction
from typing import Literal

from ..guards import DomainError, positive_support_required, truncation_required
from . import lattice
from .scalars import weight
from .sequences import ModeSequence, SpaceTimeSequence, st_power
from .solver import ProblemConfig

logger = logging.getLogger(__name__)


def apply_K(ctx: ProblemConfig, c: SpaceTimeSequence) -> SpaceTimeSequence:
    """(Kc)_{n,j} = c_{n,j} / (ω²·(n² - j)) en la banda de c^p, 0 fuera"""
    if c.omega is not None and c.omega.values != ctx.omega.values:
        raise DomainError(f"c está calculada con ω = {c.omega.values}, el problema usa {ctx.omega.values}")
    field = c.field
    entries = {}
    for (n, j), value in c.items():
        if not lattice.in_band(n, j, ctx.p):
            continue
        entries[(n, j)] = field.divide(value, weight(field, ctx.omega, lattice.sub(lattice.square(n), j)))
    return SpaceTimeSequence(c.d, entries, c.s, field, check=False, omega=ctx.omega)


def apply_L(c: SpaceTimeSequence) -> SpaceTimeSequence:
    """(Lc)_{n,n²} = Σ_{n ≤ k ≤ n², k ≠ n²} c_{n,k}; cero en el resto"""
    sums = {}
    for (n, j), value in c.items():
        n2 = lattice.square(n)
        if j == n2:
            continue
        key = (n, n2)
        sums[key] = sums[key] + value if key in sums else value
    return SpaceTimeSequence(c.d, sums, c.s, c.field, check=False, omega=c.omega)


def apply_I_minus_L(c: SpaceTimeSequence) -> SpaceTimeSequence:
    return c - apply_L(c)


def embed_iota(phi: ModeSequence) -> SpaceTimeSequence:
    """(ιφ)_{n,n²} = φ_n"""
    positive_support_required(phi.entries.keys())
    entries = {(n, lattice.square(n)): value for n, value in phi.items()}
    return SpaceTimeSequence(phi.d, entries, phi.s, phi.field, check=False)


def apply_T(ctx: ProblemConfig, phi: ModeSequence, c: SpaceTimeSequence) -> SpaceTimeSequence:
    if phi.field is not c.field:
        raise DomainError("φ y c deben estar sobre el mismo campo escalar")
    nonlinear = apply_K(ctx, st_power(c, ctx.p))
    return embed_iota(phi) + apply_I_minus_L(nonlinear)


def project(c: SpaceTimeSequence, N: int, part: Literal["head", "tail"] = "head") -> SpaceTimeSequence:
    """π_N (head: todas las componentes de n ≤ N) o π_∞ = I - π_N (tail)"""
    truncation_required(N)
    if part == "head":
        return c.filtered(lambda n, j: max(n) <= N)
    if part == "tail":
        return c.filtered(lambda n, j: max(n) > N)
    raise DomainError(f"Parte de proyección desconocida: {part!r}")


def residual(ctx: ProblemConfig, phi: ModeSequence, c: SpaceTimeSequence, N: int):
    """‖π_N(T(c) - c)‖"""
    return project(apply_T(ctx, phi, c) - c, N, "head").norm()


def k_norm_bound(ctx: ProblemConfig):
    """‖K‖ ≤ 1 / (p(p-1)‖ω‖²): en la banda cada n_i² - j_i ≥ (p-1)p"""
    p = ctx.p
    return Fraction(1, p * (p - 1)) / Fraction(ctx.omega.norm_sq)
