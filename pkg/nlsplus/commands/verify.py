import json
import logging
from pathlib import Path
from typing import Optional, Tuple

from pydantic import BaseModel, ValidationError

from ..guards import CommandError, NLSError
from ..runtime import RunConfig
from ..core.verifier import RadiiReport, prove_periodic, recheck_report
from .params import exact_complex, parse_omega
from .reports import emit_certificate_pdf, emit_report

logger = logging.getLogger(__name__)

EXIT_CERTIFIED = 0
EXIT_INCONCLUSIVE = 2

# --- Schemas ---

class VerifyRequest(BaseModel):
    A: Tuple[float, float]
    omega: float
    N: int
    r: Optional[float] = None
    sweep: bool = False


def register(subparsers, common) -> dict:
    verify = subparsers.add_parser("verify", parents=[common],
                                   help="Certifica la órbita periódica de u0 = A e^{iωx} (p = 2, d = 1)")
    verify.add_argument("--A", default=None, help="amplitud 're,im' o real, leída como racional exacto (0.1 = 1/10)")
    verify.add_argument("--omega", default="1", help="frecuencia ω > 0 (default: 1)")
    verify.add_argument("--N", type=int, default=None, help="orden de truncamiento")
    verify.add_argument("--r", type=float, default=None, help="radio; por defecto el vértice de P")
    verify.add_argument("--sweep", action="store_true", help="probar r en una malla logarítmica")
    verify.add_argument("--recheck", default=None, help="re-evaluar P(r) de un report.json existente")
    verify.add_argument("--pdf", default=None, help="certificado PDF adicional")
    verify.add_argument("--timing", action="store_true", help="incluir el tiempo de cómputo en el reporte")
    verify.add_argument("--out", default=None, help="report.json (default: stdout)")
    verify.set_defaults(handler=run_verify)
    return {"verify": verify}


def _load_report(path: str) -> RadiiReport:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        payload.pop("config", None)
        return RadiiReport.model_validate(payload)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise CommandError(1, f"No se pudo leer el reporte {path}: {e}")


def _recheck(args, config: RunConfig) -> int:
    report = _load_report(args.recheck)
    r = report.r if args.r is None else args.r
    verdict, P = recheck_report(report.model_copy(update={"r": r}))
    if verdict != report.verdict and args.r is None:
        logger.warning(f"El veredicto guardado ({report.verdict}) no coincide con la re-verificación ({verdict})")
    updated = report.model_copy(update={"r": r, "verdict": verdict, "Pr": P.to_pair()})
    logger.info(f"Re-verificación de {args.recheck}: {verdict}")
    emit_report(updated, args.out, config, exclude=None if args.timing else {"timing"})
    return EXIT_CERTIFIED if verdict == "certified" else EXIT_INCONCLUSIVE


def run_verify(args, config: RunConfig) -> int:
    if args.recheck:
        return _recheck(args, config)
    if args.A is None or args.N is None:
        raise CommandError(1, "verify requiere --A y --N (o --recheck)")

    omega = parse_omega(args.omega)
    if omega.d != 1:
        raise CommandError(1, "verify solo certifica d = 1")
    A = exact_complex(args.A)
    request = VerifyRequest(A=(float(A.re), float(A.im)), omega=omega.values[0], N=args.N,
                            r=args.r, sweep=args.sweep)
    if request.r is not None and not request.r > 0:
        raise CommandError(1, f"El radio debe ser positivo (recibido {request.r})")

    try:
        report = prove_periodic(A, request.omega, request.N, r=request.r, sweep=request.sweep)
    except NLSError:
        raise
    except Exception as e:
        logger.error(f"Error en la certificación: {e}")
        raise CommandError(1, f"Error interno: {e}")

    emit_report(report, args.out, config, exclude=None if args.timing else {"timing"})
    if args.pdf:
        emit_certificate_pdf(report, args.pdf)
    if report.verdict == "certified":
        logger.info(f"✅ verify: certificado con r={report.r}")
        return EXIT_CERTIFIED
    logger.info("❌ verify: inconcluso")
    return EXIT_INCONCLUSIVE
