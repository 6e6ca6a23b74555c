import json
import logging
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from ..guards import CommandError, DivergenceError, NLSError
from ..runtime import RunConfig
from ..core.evaluation import GridSpec, emit_grid, integrate_galerkin
from ..core.sequences import SpaceTimeSequence
from .params import parse_omega, parse_phi, phi_as_complex
from .reports import emit_table

logger = logging.getLogger(__name__)

# --- Schemas ---

class IntegrateRequest(BaseModel):
    p: int
    omega: List[float]
    N: int
    t_end: float
    dt: float
    out: Optional[str] = None


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CommandError(1, f"Lista de números inválida: {text!r}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CommandError(1, f"Lista de enteros inválida: {text!r}")


def register(subparsers, common) -> dict:
    evaluate = subparsers.add_parser("evaluate", parents=[common],
                                     help="Evalúa u(t,x) de un coeffs.json sobre una malla")
    evaluate.add_argument("--coeffs", required=True, help="archivo JSON producido por 'coeffs'")
    evaluate.add_argument("--omega", default=None, help="ω; por defecto el guardado en el archivo")
    evaluate.add_argument("--t0", type=float, default=0.0, help="tiempo inicial (default: 0)")
    evaluate.add_argument("--t1", type=float, required=True, help="tiempo final")
    evaluate.add_argument("--nt", type=int, default=101, help="puntos en t (default: 101)")
    evaluate.add_argument("--x0", default="0", help="inicio en x, una entrada por dimensión (default: 0)")
    evaluate.add_argument("--x1", required=True, help="fin en x, una entrada por dimensión")
    evaluate.add_argument("--nx", default="101", help="puntos en x por dimensión (default: 101)")
    evaluate.add_argument("--out", default=None, help="grid.csv o .xlsx (default: stdout)")
    evaluate.set_defaults(handler=run_evaluate)

    integrate = subparsers.add_parser("integrate", parents=[common],
                                      help="Oráculo RK4 sobre el sistema de Galerkin truncado (d = 1)")
    integrate.add_argument("--p", type=int, default=2, help="exponente (default: 2)")
    integrate.add_argument("--omega", default="1", help="frecuencia ω (default: 1)")
    integrate.add_argument("--phi", required=True, help="archivo JSON o 'n:re,im;…'")
    integrate.add_argument("--N", type=int, required=True, help="modo máximo")
    integrate.add_argument("--t-end", type=float, required=True, help="tiempo final")
    integrate.add_argument("--dt", type=float, default=1e-3, help="paso de RK4 (default: 1e-3)")
    integrate.add_argument("--out", default=None, help="traj.csv o .xlsx (default: stdout)")
    integrate.set_defaults(handler=run_integrate)
    return {"evaluate": evaluate, "integrate": integrate}


def _load_coeffs(path: str):
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CommandError(1, f"No se pudo leer {path}: {e}")
    try:
        return payload, SpaceTimeSequence.from_payload(payload)
    except (KeyError, TypeError, ValueError) as e:
        raise CommandError(1, f"{path} no tiene el esquema de coeficientes: {e}")


def run_evaluate(args, config: RunConfig) -> int:
    payload, c = _load_coeffs(args.coeffs)
    if args.omega is not None:
        omega = parse_omega(args.omega)
    elif "omega" in payload:
        omega = parse_omega(",".join(str(w) for w in payload["omega"]))
    else:
        raise CommandError(1, f"{args.coeffs} no guarda ω; use --omega")
    try:
        grid = GridSpec(t_min=args.t0, t_max=args.t1, nt=args.nt,
                        x_min=_float_list(args.x0), x_max=_float_list(args.x1), nx=_int_list(args.nx))
    except ValidationError as e:
        raise CommandError(1, f"Malla inválida: {e}")

    try:
        frame = emit_grid(c, omega, grid)
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error evaluando la malla: {e}")
        raise CommandError(1, f"Error interno: {e}")

    emit_table(frame, args.out, config, title=f"u(t,x) desde {Path(args.coeffs).name}")
    return 0


def run_integrate(args, config: RunConfig) -> int:
    omega = parse_omega(args.omega)
    if omega.d != 1:
        raise CommandError(1, "integrate solo está disponible para d = 1")
    request = IntegrateRequest(p=args.p, omega=omega.values, N=args.N, t_end=args.t_end, dt=args.dt, out=args.out)
    phi = phi_as_complex(parse_phi(args.phi, 1))
    try:
        trajectory = integrate_galerkin(phi, omega, request.p, request.N, request.t_end, request.dt)
    except DivergenceError as e:
        raise CommandError(1, f"{e} (último tiempo finito {e.last_finite_time!r})")
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error integrando: {e}")
        raise CommandError(1, f"Error interno: {e}")

    emit_table(trajectory.to_frame(), request.out, config, title=f"RK4 p={request.p}, N={request.N}, dt={request.dt}")
    return 0
