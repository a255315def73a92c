"""CSV export with stable formatting, so equal inputs give byte-equal files."""
from __future__ import annotations

import csv
import io
import math
from fractions import Fraction
from numbers import Integral, Real
from typing import Iterable, Sequence


def format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, Integral):
        return str(int(v))
    if isinstance(v, Real):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".12g")
    return str(v)


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row width does not match header")
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def export_csv(header: Sequence[str], rows: Sequence[Sequence], path) -> None:
    rows = list(rows)
    if not rows:
        raise ValueError("refusing to write an empty table")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(header, rows))
