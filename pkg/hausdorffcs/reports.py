"""
HausdorffCS
Copyright (C) 2026 HausdorffCS developers

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU General Public License as published by
the Free Software Foundation, either version 3 of the License, or
(at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU General Public License for more details.

You should have received a copy of the GNU General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""

import csv
import io
import json
from typing import Iterable, Optional, Sequence

import numpy as np

from hausdorffcs import log

FORMATS = ("csv", "json", "jsonl")


def format_number(value) -> str:
    """Locale-independent text for one CSV cell; floats carry 17 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def table_to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buffer.getvalue()


def table_to_records(columns: Sequence[str], rows: Iterable[Sequence]) -> list[dict]:
    return [{name: _plain(v) for name, v in zip(columns, row)} for row in rows]


def table_to_jsonl(columns: Sequence[str], rows: Iterable[Sequence], header: Optional[dict] = None) -> str:
    records = table_to_records(columns, rows)
    lines = ([json.dumps(header)] if header is not None else []) + [json.dumps(r) for r in records]
    return "\n".join(lines) + "\n"


def to_json(payload: dict) -> str:
    return json.dumps({key: _plain(value) for key, value in payload.items()}, indent=2) + "\n"


def render_table(fmt: str, columns: Sequence[str], rows: Iterable[Sequence], header: Optional[dict] = None) -> str:
    """A table in one of FORMATS; json puts the rows under `rows`, after the header fields."""
    rows = list(rows)
    if fmt == "csv":
        return table_to_csv(columns, rows)
    if fmt == "jsonl":
        return table_to_jsonl(columns, rows, header)
    if fmt == "json":
        return to_json({**(header or {}), "rows": table_to_records(columns, rows)})
    raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")


def save_text(text: str, out_filename: str):
    try:
        with open(out_filename, "w", encoding="utf-8", newline="\n") as outfile:
            outfile.write(text)
        log.info(f"Report successfully saved to {out_filename}")
    except OSError as e:
        log.debug(f"Unable to save report to [{out_filename}]: {e}")
        raise
