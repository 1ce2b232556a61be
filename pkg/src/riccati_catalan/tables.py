"""CSV/JSON table output with atomic writes."""

from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Sequence

__all__ = ["render_table", "emit_table", "write_atomic"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _validate(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    if not columns:
        raise ValueError("table needs at least one column")
    if not rows:
        raise ValueError("table has no rows")
    width = len(columns)
    for n, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"row {n} has {len(row)} cells, expected {width}")


def render_table(
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    fmt: str = "csv",
    meta: dict | None = None,
) -> str:
    """Encode a rectangular table; floats carry 17 significant digits in CSV."""
    _validate(columns, rows)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {"meta": meta or {}, "columns": list(columns), "rows": [list(r) for r in rows]}
        return json.dumps(doc, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected csv or json")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        _unlink_quietly(tmp)
        raise


def _unlink_quietly(path: str) -> None:
    try:
        os.unlink(path)
    except FileNotFoundError:
        pass


def emit_table(
    columns: Sequence[str],
    rows: Sequence[Sequence[Any]],
    fmt: str = "csv",
    path: str | os.PathLike | None = None,
    meta: dict | None = None,
) -> str:
    """Render and write a table to ``path`` (stdout when ``None``); returns the text."""
    text = render_table(columns, rows, fmt, meta)
    if path is None:
        sys.stdout.write(text)
    else:
        write_atomic(path, text)
    return text
