"""CSV files with a ``# key: value`` provenance header.

Header values are single-line strings (JSON for structured values). Floats
are written with ``repr`` so they round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _cell(v.item())
    return str(v)


def write_csv(path: str | Path, header: dict, columns: Sequence[str],
              rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    for key, value in header.items():
        text = value if isinstance(value, str) else json.dumps(value, sort_keys=True)
        buf.write(f"# {key}: {text}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_csv(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    """Return ``(header, columns, rows)``; header values are raw strings."""
    header, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = value
        else:
            body.append(line)
    table = list(csv.reader(body))
    return header, table[0], table[1:]
