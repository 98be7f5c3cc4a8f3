from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader, select_autoescape

try:
    from openpyxl import Workbook  # type: ignore
except Exception:  # pragma: no cover - optional dependency
    Workbook = None  # type: ignore

from .constants import REPORT_SCHEMA_VERSION, TEMPLATE_DIR

logger = logging.getLogger(__name__)

REPORT_TEMPLATE = "report.html"


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write ``text`` to ``path`` through a temp file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_value(value: Any) -> Any:
    """Render floats with 12 significant digits so reports are stable."""
    if isinstance(value, float):
        if math.isinf(value):
            return "-inf" if value < 0 else "inf"
        return format(value, ".12g")
    return value


def write_csv(path: Path | str, columns: Sequence[str],
              rows: Iterable[Sequence[Any]]) -> int:
    """Write a header row plus ``rows``; returns the number of data rows."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    count = 0
    for row in rows:
        writer.writerow([format_value(v) for v in row])
        count += 1
    atomic_write_text(path, buf.getvalue())
    logger.debug("Wrote %d rows to %s", count, path)
    return count


def read_csv(path: Path | str) -> List[Dict[str, str]]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path: Path | str, data: Any) -> None:
    text = json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
    atomic_write_text(path, text + "\n")


def read_json(path: Path | str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_workbook(path: Path | str,
                   sheets: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]]) -> bool:
    """Save each ``name -> (columns, rows)`` table as one worksheet.

    Returns ``False`` and logs a warning when openpyxl is unavailable.
    """
    if Workbook is None:
        logger.warning("openpyxl not available; skipping %s", path)
        return False
    wb = Workbook()
    wb.remove(wb.active)
    for name, (columns, rows) in sheets.items():
        # worksheet titles are limited to 31 characters
        ws = wb.create_sheet(title=name[:31])
        ws.append(list(columns))
        for row in rows:
            ws.append([None if isinstance(v, float) and math.isinf(v) else v for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    wb.save(path)
    logger.info("Workbook written to %s", path)
    return True


def render_report(path: Path | str, title: str,
                  tables: Dict[str, Tuple[Sequence[str], List[Sequence[Any]]]],
                  summary: Dict[str, Any] | None = None) -> None:
    """Render the HTML summary page of a report bundle."""
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        autoescape=select_autoescape(["html"]),
    )
    template = env.get_template(REPORT_TEMPLATE)
    rendered = template.render(
        title=title,
        schema_version=REPORT_SCHEMA_VERSION,
        summary=summary or {},
        tables=[
            (name, list(columns), [[format_value(v) for v in row] for row in rows])
            for name, (columns, rows) in tables.items()
        ],
    )
    atomic_write_text(path, rendered)
