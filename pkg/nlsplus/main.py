from dotenv import dotenv_values, load_dotenv
from pathlib import Path
from typing import Dict, List, Optional
import argparse
import json
import logging
import sys
import time

# Importar módulos
from .runtime import RUN_CONFIG, RunConfig, set_threads, get_pool_status, coefficient_cache
from .guards import CommandError, NLSError, SingularityError, DivergenceError
from .commands import coeffs, verify, classify, evaluate

# Configurar logging (siempre a stderr; stdout queda para los resultados)
logging.basicConfig(
    level=RUN_CONFIG['log_level'],
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

# Cargar variables de entorno
load_dotenv()

COMMAND_MODULES = [coeffs, verify, classify, evaluate]

# ================================
# PARSER
# ================================

class CommandParser(argparse.ArgumentParser):
    """ArgumentParser que falla con CommandError(1) en lugar de sys.exit(2)"""

    def error(self, message):
        raise CommandError(1, f"{self.prog}: {message}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="archivo key=value con valores por defecto de los flags")
    common.add_argument("--threads", type=int, default=None,
                        help=f"hilos de trabajo (default: NLS_THREADS o {RUN_CONFIG['threads']})")
    common.add_argument("--log-level", default=None, help=f"nivel de logging (default: {RUN_CONFIG['log_level']})")

    parser = CommandParser(prog="nlsplus",
                           description="Coeficientes, certificados y diagnósticos para i u_t = Δu + u^p en A⁺")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)
    commands = {}
    for module in COMMAND_MODULES:
        commands.update(module.register(subparsers, common))
    return parser, commands


def _find_command(argv: List[str], commands: Dict) -> Optional[str]:
    for token in argv:
        if token in commands:
            return token
    return None


def _config_path(argv: List[str]) -> Optional[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    return known.config


def _as_bool(key: str, value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "si", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise CommandError(1, f"Valor booleano inválido para {key}: {value!r}")


def apply_config_file(subparser: argparse.ArgumentParser, path: str) -> Dict[str, str]:
    """Los valores del archivo pasan a ser defaults; los flags explícitos ganan"""
    if not Path(path).is_file():
        raise CommandError(1, f"No existe el archivo de configuración {path}")
    values = dotenv_values(path)
    actions = {action.dest: action for action in subparser._actions if action.dest not in ("help", "config")}
    defaults = {}
    for key, value in values.items():
        dest = key.strip().lstrip("-").replace("-", "_")
        if dest not in actions:
            raise CommandError(1, f"Clave desconocida en {path}: {key!r}")
        action = actions[dest]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[dest] = _as_bool(key, value)
        else:
            # argparse convierte los defaults de tipo str con el type de la acción
            defaults[dest] = value
        action.required = False
    subparser.set_defaults(**defaults)
    logger.info(f"Configuración cargada desde {path}: {sorted(defaults)}")
    return values


def _resolved_flags(args) -> dict:
    flags = {}
    for key, value in sorted(vars(args).items()):
        if key in ("handler", "command", "config"):
            continue
        flags[key] = value if isinstance(value, (str, int, float, bool, type(None))) else str(value)
    return flags

# ================================
# DESPACHO
# ================================

def _dispatch(argv: List[str]) -> int:
    parser, commands = build_parser()
    config_file = _config_path(argv)
    if config_file is not None:
        command = _find_command(argv, commands)
        if command is None:
            raise CommandError(1, "--config requiere un subcomando")
        apply_config_file(commands[command], config_file)

    args = parser.parse_args(argv)
    if args.log_level:
        try:
            logging.getLogger().setLevel(args.log_level.upper())
        except ValueError:
            raise CommandError(1, f"Nivel de logging inválido: {args.log_level!r}")
    try:
        set_threads(args.threads)
    except ValueError as e:
        raise CommandError(1, str(e))

    config = RunConfig(
        command=args.command,
        flags=_resolved_flags(args),
        config_file=config_file,
        threads=RUN_CONFIG['threads'],
        output=getattr(args, "out", None),
    )
    logger.debug(f"Configuración resuelta: {config.model_dump()}")
    started = time.perf_counter()
    code = args.handler(args, config)
    logger.info(f"{args.command} terminado con código {code} en {time.perf_counter() - started:.2f}s "
                f"(pool: {get_pool_status()['status']}, cache: {coefficient_cache.get_stats()})")
    return code


def _report_error(detail: str, exit_code: int) -> None:
    sys.stderr.write(json.dumps({"error": detail, "exit_code": exit_code, "timestamp": time.time()},
                                ensure_ascii=False) + "\n")


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    """Ejecuta un subcomando; 0 éxito/certificado, 2 inconcluso, 1 error"""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _dispatch(argv)
    except CommandError as e:
        logger.error(f"❌ {e.detail}")
        _report_error(e.detail, e.exit_code)
        return e.exit_code
    except SingularityError as e:
        logger.error(f"❌ Singularidad en t* = {e.blowup_time}: {e}")
        _report_error(str(e), 1)
        return 1
    except DivergenceError as e:
        logger.error(f"❌ Divergencia después de t = {e.last_finite_time}: {e}")
        _report_error(str(e), 1)
        return 1
    except NLSError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        _report_error(str(e), 1)
        return 1
    except Exception as e:
        logger.error(f"Unhandled exception: {e}", exc_info=True)
        _report_error(f"Error interno: {e}", 1)
        return 1


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
