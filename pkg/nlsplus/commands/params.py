"""
Lectura de parámetros de la línea de comandos: complejos, ω y el dato φ.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Tuple

from ..guards import CommandError, DomainError, non_negative_index_required
from ..core.lattice import FrequencyVector
from ..core.scalars import QComplex

logger = logging.getLogger(__name__)

# φ se guarda como (re, im) en texto para que el campo racional lo lea exacto
PhiEntries = Dict[Tuple[int, ...], Tuple[str, str]]


def parse_complex(text: str) -> Tuple[str, str]:
    """'re,im' o un real suelto; devuelve las partes como texto"""
    parts = [part.strip() for part in str(text).split(",")]
    if len(parts) == 1:
        parts.append("0")
    if len(parts) != 2 or not all(parts):
        raise CommandError(1, f"Número complejo inválido: {text!r} (use 're,im' o un real)")
    for part in parts:
        try:
            _to_float(part)
        except (ValueError, ZeroDivisionError):
            raise CommandError(1, f"Número complejo inválido: {text!r}")
    return parts[0], parts[1]


def complex_value(text: str) -> complex:
    re, im = parse_complex(text)
    return complex(_to_float(re), _to_float(im))


def exact_complex(text: str) -> QComplex:
    """Como complex_value pero sin redondear: '0.1' es exactamente 1/10"""
    re, im = parse_complex(text)
    try:
        return QComplex(re, im)
    except (ValueError, ZeroDivisionError):
        raise CommandError(1, f"Número complejo no racional: {text!r}")


def _to_float(part: str) -> float:
    if "/" in part:
        num, den = part.split("/")
        return float(num) / float(den)
    return float(part)


def parse_omega(text: str) -> FrequencyVector:
    try:
        values = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise CommandError(1, f"ω inválido: {text!r} (lista separada por comas)")
    try:
        return FrequencyVector.of(values)
    except DomainError as e:
        raise CommandError(1, str(e))


def _phi_from_json(path: Path) -> PhiEntries:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CommandError(1, f"No se pudo leer φ desde {path}: {e}")
    rows = payload.get("entries") if isinstance(payload, dict) else payload
    if not isinstance(rows, list):
        raise CommandError(1, f"{path}: se esperaba una lista 'entries' de modos")
    phi: PhiEntries = {}
    for row in rows:
        try:
            n = row["n"]
            n = non_negative_index_required([n] if isinstance(n, int) else n)
            phi[n] = (str(row.get("re", 0)), str(row.get("im", 0)))
        except (KeyError, TypeError, ValueError) as e:
            raise CommandError(1, f"{path}: modo de φ mal formado {row!r} ({e})")
    return phi


def _phi_inline(text: str) -> PhiEntries:
    """'n:re,im;n:re,im' (d = 1)"""
    phi: PhiEntries = {}
    for chunk in str(text).split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise CommandError(1, f"Modo de φ mal formado: {chunk!r} (use 'n:re,im')")
        mode, value = chunk.split(":", 1)
        try:
            n = non_negative_index_required([int(mode)])
        except (ValueError, DomainError):
            raise CommandError(1, f"Modo de φ inválido: {mode!r}")
        phi[n] = parse_complex(value)
    return phi


def parse_phi(text: str, d: int) -> PhiEntries:
    """φ desde un archivo JSON o en línea (solo d = 1)"""
    path = Path(str(text))
    if str(text).endswith(".json") or path.is_file():
        phi = _phi_from_json(path)
    elif d == 1:
        phi = _phi_inline(text)
    else:
        raise CommandError(1, "Para d ≥ 2 el dato φ debe venir en un archivo JSON")
    for n in phi:
        if len(n) != d:
            raise CommandError(1, f"El modo {list(n)} de φ no tiene dimensión {d}")
    logger.debug(f"φ leído con {len(phi)} modos")
    return phi


def phi_as_complex(phi: PhiEntries) -> Dict[int, complex]:
    """φ de d = 1 como {n: complex}"""
    return {n[0]: complex(_to_float(re), _to_float(im)) for n, (re, im) in phi.items()}
