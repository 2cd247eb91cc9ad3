"""Deterministic file output: decimal rendering, atomic writes, orbit traces."""

from __future__ import annotations

import csv
import decimal
import io
import os
import tempfile
from fractions import Fraction
from pathlib import Path

TRACE_HEADER = ("k", "label", "coord", "second_coord")


def decimal_str(x, digits: int = 12) -> str:
    """``x`` at ``digits`` significant digits, round-half-even, fixed notation."""
    x = Fraction(x)
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    d = ctx.divide(decimal.Decimal(x.numerator), decimal.Decimal(x.denominator))
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def atomic_write(path, text: str) -> Path:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def trace_csv(system, points: dict, horizon: int) -> str:
    """One row per point per step for the orbits of ``points`` (label -> point)."""
    from .numerics import orbit

    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    if horizon == 0:
        return buf.getvalue()
    orbits = {label: orbit(system, p, horizon) for label, p in points.items()}
    for k in range(horizon):
        for label, orb in orbits.items():
            p = orb[k]
            w.writerow([k, label, decimal_str(p.coord), decimal_str(p.second)])
    return buf.getvalue()


def export_trace(system, points: dict, horizon: int, path) -> Path:
    try:
        return atomic_write(path, trace_csv(system, points, horizon))
    except OSError as exc:
        raise OSError(f"could not write trace to {path}: {exc}") from exc
