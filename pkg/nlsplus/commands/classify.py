import logging
from typing import Optional

from pydantic import BaseModel

from ..guards import CommandError, NLSError
from ..runtime import RUN_CONFIG, RunConfig
from ..core.dynamics import classify_monochromatic, estimate_Astar
from ..core.sequences import ModeSequence
from .params import complex_value, parse_omega, parse_phi
from .reports import emit_report

logger = logging.getLogger(__name__)

# --- Schemas ---

class AstarResult(BaseModel):
    Astar: float
    r_squared: float
    n_min: int
    n_max: int
    N: int
    fft: bool


def register(subparsers, common) -> dict:
    classify = subparsers.add_parser("classify", parents=[common],
                                     help="Régimen (periódico / explosión) de u0 = A e^{iωx}, p = 2")
    classify.add_argument("--A", required=True, help="amplitud 're,im' o real")
    classify.add_argument("--omega", default="1", help="frecuencia ω > 0 (default: 1)")
    classify.add_argument("--escalate-N", type=int, default=None,
                          help="intentar prove_periodic con este N si 3ω² < |A| < 6ω²")
    classify.add_argument("--higher-modes", default=None,
                          help="modos n ≥ 2 añadidos al dato ('n:re,im;…' o JSON)")
    classify.add_argument("--out", default=None, help="archivo JSON de salida (default: stdout)")
    classify.set_defaults(handler=run_classify)

    astar = subparsers.add_parser("estimate-astar", parents=[common],
                                  help="Estimación de la amplitud crítica A* por regresión")
    astar.add_argument("--n-min", type=int, default=60, help="primera capa del ajuste (default: 60)")
    astar.add_argument("--n-max", type=int, default=150, help="última capa del ajuste (default: 150)")
    astar.add_argument("--N", type=int, default=None, help="capas calculadas (default: n-max)")
    astar.add_argument("--fft", action="store_true", default=None,
                       help=f"convolución FFT (default: si n-max ≥ {RUN_CONFIG['fft_threshold']})")
    astar.add_argument("--out", default=None, help="archivo JSON de salida (default: stdout)")
    astar.set_defaults(handler=run_estimate_astar)
    return {"classify": classify, "estimate-astar": astar}


def run_classify(args, config: RunConfig) -> int:
    omega = parse_omega(args.omega)
    A = complex_value(args.A)
    higher: Optional[ModeSequence] = None
    if args.higher_modes:
        modes = parse_phi(args.higher_modes, 1)
        if any(n[0] < 2 for n in modes):
            raise CommandError(1, "--higher-modes solo admite modos n ≥ 2")
        higher = ModeSequence(1, modes)
    try:
        result = classify_monochromatic(A, omega, escalate_N=args.escalate_N, higher_modes=higher)
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error clasificando: {e}")
        raise CommandError(1, f"Error interno: {e}")

    logger.info(f"classify: A={A}, ω={omega.values[0]} → {result.regime}")
    emit_report(result, args.out, config)
    return 2 if result.regime == "undetermined" else 0


def run_estimate_astar(args, config: RunConfig) -> int:
    N = args.n_max if args.N is None else args.N
    if N < args.n_max:
        raise CommandError(1, f"--N ({N}) debe ser ≥ --n-max ({args.n_max})")
    fft = args.fft if args.fft is not None else args.n_max >= RUN_CONFIG['fft_threshold']
    try:
        a_star, r_squared = estimate_Astar(args.n_min, args.n_max, fft=fft, N=N)
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error estimando A*: {e}")
        raise CommandError(1, f"Error interno: {e}")

    result = AstarResult(Astar=a_star, r_squared=r_squared, n_min=args.n_min, n_max=args.n_max, N=N, fft=fft)
    emit_report(result, args.out, config)
    return 0
