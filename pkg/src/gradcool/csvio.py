"""CSV emission and parsing with lossless float round trips.

Numbers are printed with the shortest decimal representation that
round-trips 64-bit binary floats (Python's repr); comment lines prefixed
'#' carry run provenance and are preserved by the reader.
"""

from __future__ import annotations

import hashlib
import io
from typing import Iterable, Sequence

__all__ = ["format_value", "write_csv", "read_csv", "provenance_lines", "config_hash"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalars
        return format_value(v.item())
    return str(v)


def write_csv(
    target,
    header: Sequence[str],
    rows: Iterable[Sequence],
    comments: Sequence[str] = (),
) -> None:
    """Write a rectangular CSV (comma separator, newline rows, UTF-8)."""
    own = isinstance(target, (str, bytes))
    f = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in comments:
            f.write(f"# {line}\n")
        f.write(",".join(header) + "\n")
        ncol = len(header)
        for row in rows:
            if len(row) != ncol:
                raise ValueError(f"row width {len(row)} != header width {ncol}")
            f.write(",".join(format_value(v) for v in row) + "\n")
    finally:
        if own:
            f.close()


def read_csv(source) -> tuple[list[str], list[list], list[str]]:
    """Parse a CSV written by :func:`write_csv`.

    Returns (header, rows, comments); numeric fields come back as float
    (bit-exact for values written by this module), everything else as str.
    """
    own = isinstance(source, (str, bytes))
    f = open(source, "r", encoding="utf-8") if own else source
    try:
        comments: list[str] = []
        header: list[str] | None = None
        rows: list[list] = []
        for raw in f:
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line[1:].strip())
                continue
            fields = line.split(",")
            if header is None:
                header = fields
                continue
            if len(fields) != len(header):
                raise ValueError("ragged CSV row")
            parsed = []
            for tok in fields:
                try:
                    parsed.append(float(tok))
                except ValueError:
                    parsed.append(tok)
            rows.append(parsed)
        if header is None:
            raise ValueError("CSV has no header row")
        return header, rows, comments
    finally:
        if own:
            f.close()


def config_hash(items: dict) -> str:
    """Deterministic hash of a flat config mapping (no timestamps involved)."""
    canon = "\n".join(f"{k}={format_value(items[k])}" for k in sorted(items))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def provenance_lines(items: dict) -> list[str]:
    """Comment lines recording every pinned parameter plus the config hash."""
    lines = [f"{k}={format_value(items[k])}" for k in sorted(items)]
    lines.append(f"config_hash={config_hash(items)}")
    return lines


def csv_text(header: Sequence[str], rows: Iterable[Sequence], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows, comments)
    return buf.getvalue()
