"""Deterministic delimited output.

Every table the package emits goes through here so the bytes are identical
across runs and platforms: fixed column order, LF line endings, and one
float format rule everywhere.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Sequence


def format_float(value: float) -> str:
    """Render a float deterministically.

    Zero is "0"; magnitudes in [1e-3, 1e6) use %.12g, everything else
    scientific %.12e.  12 significant digits round-trip comfortably while
    keeping diffs readable.
    """
    if value == 0:
        return "0"
    mag = abs(value)
    if 1e-3 <= mag < 1e6:
        return "%.12g" % value
    return "%.12e" % value


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format_float(float(value))


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a CSV with LF endings and the shared float formatting."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    text = "\n".join(lines) + "\n"
    parent = os.path.dirname(str(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
