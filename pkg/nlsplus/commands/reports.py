"""
Salidas de los comandos: JSON determinista, tablas CSV/XLSX y el
certificado en PDF.
"""
import json
import logging
import sys
import unicodedata
from pathlib import Path
from typing import Optional, Union

import pandas as pd
from fpdf import FPDF
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font
from pydantic import BaseModel

from ..guards import CommandError
from ..runtime import RunConfig

logger = logging.getLogger(__name__)


def safe(text):
    """Convierte texto a latin-1 seguro para fpdf con Helvetica."""
    if not isinstance(text, str):
        text = str(text)
    replacements = {
        '≤': '<=', '≥': '>=', 'ω': 'w', '²': '^2', 'ĉ': 'c^',
        '–': '-', '—': '-', '…': '...', '∈': 'in',
    }
    for k, v in replacements.items():
        text = text.replace(k, v)
    text = unicodedata.normalize('NFC', text)
    return text.encode('latin-1', errors='replace').decode('latin-1')


def dumps_json(payload: dict) -> str:
    """JSON determinista: claves ordenadas, repr mínimo de los float"""
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def _write_text(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"Error escribiendo {path}: {e}")
        raise CommandError(1, f"No se pudo escribir {path}: {e}")


def emit_report(result: Union[BaseModel, dict], path: Optional[str], config: RunConfig,
                exclude: Optional[set] = None) -> dict:
    """Escribe el resultado con la configuración resuelta bajo 'config'"""
    if isinstance(result, BaseModel):
        payload = result.model_dump(mode="json", exclude=exclude)
    else:
        payload = dict(result)
    payload["config"] = config.model_dump(mode="json")
    _write_text(dumps_json(payload), path)
    if path is not None:
        logger.info(f"Reporte escrito en {path}")
    return payload


def _write_xlsx(frame: pd.DataFrame, path: str, title: str) -> None:
    wb = Workbook()
    ws = wb.active
    ws.title = "Datos"
    ws['A1'] = title

    for col, header in enumerate(frame.columns, 1):
        cell = ws.cell(row=3, column=col, value=str(header))
        cell.font = Font(bold=True)
        cell.alignment = Alignment(horizontal='center')

    for row_num, row in enumerate(frame.itertuples(index=False), start=4):
        for col, value in enumerate(row, 1):
            ws.cell(row=row_num, column=col, value=value.item() if hasattr(value, "item") else value)
    wb.save(path)


def emit_table(frame: pd.DataFrame, path: Optional[str], config: RunConfig, title: str) -> None:
    """CSV (o XLSX según la extensión) y la configuración en <out>.meta.json"""
    if path is None:
        sys.stdout.write(frame.to_csv(index=False))
        return
    try:
        if path.endswith(".xlsx"):
            _write_xlsx(frame, path, title)
        else:
            frame.to_csv(path, index=False)
    except OSError as e:
        logger.error(f"Error escribiendo {path}: {e}")
        raise CommandError(1, f"No se pudo escribir {path}: {e}")
    _write_text(dumps_json({"config": config.model_dump(mode="json"), "rows": len(frame), "title": title}),
                f"{path}.meta.json")
    logger.info(f"Tabla de {len(frame)} filas escrita en {path}")


def emit_certificate_pdf(report: BaseModel, path: str) -> None:
    """Certificado de una ejecución de verify en una página"""
    data = report.model_dump(mode="json")
    try:
        pdf = FPDF()
        pdf.add_page()

        pdf.set_font("Helvetica", 'B', 16)
        pdf.cell(0, 12, "CERTIFICADO DE ORBITA PERIODICA", ln=True, align="C")
        pdf.set_font("Helvetica", size=10)
        pdf.cell(0, 6, "i u_t = u_xx + u^2, u0 = A e^(i w x)", ln=True, align="C")
        pdf.ln(6)

        pdf.set_font("Helvetica", 'B', 12)
        pdf.cell(0, 8, "1. DATOS", ln=True)
        pdf.set_font("Helvetica", size=10)
        a_re, a_im = data["A_exact"] or data["A"]
        for label, value in [("A", f"{a_re} + {a_im} i"), ("omega", repr(data["omega"])),
                             ("N", str(data["N"])), ("r", repr(data["r"])), ("hilos", str(data["threads"]))]:
            pdf.cell(40, 6, label, border=1)
            pdf.cell(0, 6, safe(value), border=1, ln=True)
        pdf.ln(4)

        pdf.set_font("Helvetica", 'B', 12)
        pdf.cell(0, 8, "2. COTAS (intervalos [inf, sup])", ln=True)
        pdf.set_font("Helvetica", size=10)
        for key in ["Y0", "Z1", "Z2", "Pr", "chat_norm"]:
            lo, hi = data[key]
            pdf.cell(40, 6, "P(r)" if key == "Pr" else key, border=1)
            pdf.cell(0, 6, f"[{lo!r}, {hi!r}]", border=1, ln=True)
        if data.get("root_range"):
            lo, hi = data["root_range"]
            pdf.cell(40, 6, "P < 0 en", border=1)
            pdf.cell(0, 6, f"[{lo!r}, {hi!r}]", border=1, ln=True)
        pdf.ln(4)

        pdf.set_font("Helvetica", 'B', 12)
        pdf.cell(0, 8, "3. VEREDICTO", ln=True)
        if data["verdict"] == "certified":
            pdf.set_text_color(0, 128, 0)
            pdf.set_font("Helvetica", 'B', 11)
            pdf.cell(0, 8, safe(f"CERTIFICADO: sup P(r) = {data['Pr'][1]!r} < 0"), ln=True)
        else:
            pdf.set_text_color(255, 0, 0)
            pdf.set_font("Helvetica", 'B', 11)
            pdf.cell(0, 8, "INCONCLUSO", ln=True)
        pdf.set_text_color(0, 0, 0)
        pdf.ln(4)

        pdf.set_font("Helvetica", size=8)
        pdf.cell(0, 6, f"sha256(c^) = {data['chat_digest']}", ln=True)
        pdf.output(path)
    except OSError as e:
        logger.error(f"Error creando PDF: {e}")
        raise CommandError(1, f"Error creando PDF: {e}")
    logger.info(f"Certificado PDF escrito en {path}")
