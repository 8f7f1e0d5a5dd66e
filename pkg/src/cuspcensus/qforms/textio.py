"""Plain-text Gram matrix files.

First non-comment line: the dimension d.  Next d lines: the rows, entries
integers or ``p/q``.  ``#`` starts a comment anywhere on a line.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence


class FormatError(ValueError):
    pass


def parse_gram(text: str) -> list[list[Fraction]]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise FormatError("empty input")
    try:
        d = int(lines[0])
    except ValueError:
        raise FormatError(f"first line must be the dimension, got {lines[0]!r}") from None
    if d < 1:
        raise FormatError("dimension must be positive")
    if len(lines) != d + 1:
        raise FormatError(f"expected {d} matrix rows, found {len(lines) - 1}")
    rows = []
    for k, line in enumerate(lines[1:], 1):
        parts = line.replace(",", " ").split()
        if len(parts) != d:
            raise FormatError(f"row {k}: expected {d} entries, found {len(parts)}")
        try:
            rows.append([Fraction(p) for p in parts])
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"row {k}: bad entry in {line!r}") from None
    for i in range(d):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise FormatError(f"matrix not symmetric at ({i + 1}, {j + 1})")
    return rows


def read_gram(path) -> list[list[Fraction]]:
    return parse_gram(Path(path).read_text())


def format_gram(gram: Sequence[Sequence], comment: str = "") -> str:
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(str(len(gram)))
    for row in gram:
        out.append(" ".join(str(Fraction(x)) for x in row))
    return "\n".join(out) + "\n"


def integral_rows(gram: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    if any(Fraction(x).denominator != 1 for row in gram for x in row):
        raise FormatError("expected an integral Gram matrix")
    return [[int(x) for x in row] for row in gram]
