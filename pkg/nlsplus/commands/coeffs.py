import logging
from typing import List, Optional

from pydantic import BaseModel

from ..guards import CommandError, NLSError, SingularityError
from ..runtime import RunConfig
from ..core.scalars import SCALAR_FIELDS
from ..core.sequences import ModeSequence
from ..core.solver import ProblemConfig, solve_quadrature, solve_spacetime
from .params import parse_omega, parse_phi
from .reports import emit_report, emit_table

logger = logging.getLogger(__name__)

# --- Schemas ---

class CoeffsResult(BaseModel):
    """Esquema JSON de coeficientes; ``evaluate`` lo acepta tal cual"""

    p: int
    d: int
    s: float
    scalar: str
    omega: List[float]
    N: int
    entries: List[dict]


class QuadratureRequest(BaseModel):
    p: int
    omega: List[float]
    N: int
    t_end: float
    steps: int
    out: Optional[str] = None

# ================================
# COMANDOS
# ================================

def register(subparsers, common) -> dict:
    coeffs = subparsers.add_parser("coeffs", parents=[common],
                                   help="Coeficientes c_{n,j} por la recursión espacio-tiempo")
    coeffs.add_argument("--p", type=int, default=2, help="exponente de la no linealidad (default: 2)")
    coeffs.add_argument("--d", type=int, default=1, help="dimensión del toro (default: 1)")
    coeffs.add_argument("--omega", default="1", help="frecuencias separadas por comas (default: 1)")
    coeffs.add_argument("--phi", required=True, help="archivo JSON o 'n:re,im;…' para d = 1")
    coeffs.add_argument("--N", type=int, required=True, help="orden de truncamiento")
    coeffs.add_argument("--scalar", choices=sorted(SCALAR_FIELDS), default="f64", help="campo escalar (default: f64)")
    coeffs.add_argument("--s", type=float, default=0.0, help="peso (1+|n|)^s de la norma (default: 0)")
    coeffs.add_argument("--out", default=None, help="archivo JSON de salida (default: stdout)")
    coeffs.set_defaults(handler=run_coeffs)

    quadrature = subparsers.add_parser("quadrature", parents=[common],
                                       help="Modos a_n(t) por cuadratura (d = 1, admite modo cero)")
    quadrature.add_argument("--p", type=int, default=2, help="exponente (default: 2)")
    quadrature.add_argument("--omega", default="1", help="frecuencia ω (default: 1)")
    quadrature.add_argument("--phi", required=True, help="archivo JSON o 'n:re,im;…'")
    quadrature.add_argument("--N", type=int, required=True, help="modo máximo")
    quadrature.add_argument("--t-end", type=float, required=True, help="tiempo final")
    quadrature.add_argument("--steps", type=int, default=2000, help="intervalos de la malla (default: 2000)")
    quadrature.add_argument("--out", default=None, help="CSV o XLSX de salida (default: stdout)")
    quadrature.set_defaults(handler=run_quadrature)
    return {"coeffs": coeffs, "quadrature": quadrature}


def run_coeffs(args, config: RunConfig) -> int:
    omega = parse_omega(args.omega)
    if omega.d != args.d:
        raise CommandError(1, f"ω tiene {omega.d} componentes pero --d es {args.d}")
    phi = parse_phi(args.phi, args.d)
    try:
        data = ModeSequence(args.d, phi, s=args.s, field=args.scalar)
        cfg = ProblemConfig.build(args.p, omega, data)
        c = solve_spacetime(cfg, args.N, args.scalar)
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error calculando coeficientes: {e}")
        raise CommandError(1, f"Error interno: {e}")

    payload = c.to_payload()
    payload["omega"] = omega.values
    result = CoeffsResult(p=args.p, N=args.N, **payload)
    logger.info(f"🚀 coeffs: {len(payload['entries'])} coeficientes no nulos hasta N={args.N}")
    emit_report(result, args.out, config)
    return 0


def run_quadrature(args, config: RunConfig) -> int:
    omega = parse_omega(args.omega)
    request = QuadratureRequest(p=args.p, omega=omega.values, N=args.N, t_end=args.t_end,
                                steps=args.steps, out=args.out)
    phi = parse_phi(args.phi, omega.d)
    try:
        cfg = ProblemConfig.build(request.p, omega, phi)
        trajectory = solve_quadrature(cfg, request.N, request.t_end, request.steps)
    except SingularityError as e:
        raise CommandError(1, f"{e} (t* = {e.blowup_time!r})")
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error en la cuadratura: {e}")
        raise CommandError(1, f"Error interno: {e}")

    emit_table(trajectory.to_frame(), request.out, config, title=f"Cuadratura p={request.p}, N={request.N}")
    return 0
