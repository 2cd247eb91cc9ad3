"""Finite-horizon lower/upper distribution functions and their closed forms.

The lower (upper) distribution function at ``delta`` is the liminf (limsup)
of the prefix densities ``rho_n(delta) = #{i < n : d_i < delta} / n``.  We
report the min (max) of ``rho_n`` over a tail window ``n in [w, horizon]``.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .export import decimal_str
from .numerics import DistanceSeries, as_rational

ANALYTIC_POINTS = tuple(Fraction(k, 2) for k in range(1, 11))  # 1/2, 1, ..., 5
CHUNK = 1 << 22


def threads() -> int:
    try:
        return max(1, int(os.environ.get("DCCHAOS_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------- counters


def _check_n(series: DistanceSeries, n: int) -> None:
    if not 0 <= n <= len(series):
        raise IndexError(f"n={n} outside [0, {len(series)}]")


def xi_count(series: DistanceSeries, s, n: int) -> int:
    """``#{0 <= i < n : d_i < s}``."""
    _check_n(series, n)
    return int(np.count_nonzero(series.below(s, 0, n)))


def delta_count(series: DistanceSeries, s, n: int) -> int:
    """``#{0 <= i < n : d_i >= s}``."""
    _check_n(series, n)
    return n - xi_count(series, s, n)


def prefix_counts(series: DistanceSeries, s) -> np.ndarray:
    """``xi_count(series, s, n)`` for ``n = 0..len(series)`` in one array."""
    out = np.zeros(len(series) + 1, dtype=np.int64)
    run = 0
    for a in range(0, len(series), CHUNK):
        b = min(len(series), a + CHUNK)
        c = np.cumsum(series.below(s, a, b), dtype=np.int64) + run
        out[a + 1:b + 1] = c
        run = int(c[-1]) if len(c) else run
    return out


# ---------------------------------------------------------------- grids


def default_grid(diam, levels: int = 12) -> tuple:
    """``diam * 2**-j`` for ``j = 0..levels`` merged with the half-integers up to 5,
    clipped to ``(0, diam]``."""
    diam = as_rational(diam)
    pts = {diam / (1 << j) for j in range(levels + 1)}
    pts.update(p for p in ANALYTIC_POINTS if p <= diam)
    return tuple(sorted(pts))


def default_window(horizon: int) -> int:
    return max(1000, horizon // 100)


# ------------------------------------------------------------- estimates


@dataclass(frozen=True)
class Checkpoint:
    time: int
    epoch: int
    parity: str
    density: Fraction


@dataclass
class DFEstimate:
    delta_grid: tuple
    lower: tuple
    upper: tuple
    horizon: int
    window_start: int
    checkpoints: dict = field(default_factory=dict)  # delta -> [Checkpoint]
    origin: str = ""

    def __post_init__(self):
        if not self.delta_grid:
            raise ValueError("empty delta grid")
        if list(self.delta_grid) != sorted(set(self.delta_grid)):
            raise ValueError("delta grid must be strictly increasing")

    def index(self, delta) -> int:
        return self.delta_grid.index(as_rational(delta))

    def lower_at(self, delta) -> Fraction:
        return self.lower[self.index(delta)]

    def upper_at(self, delta) -> Fraction:
        return self.upper[self.index(delta)]

    def checkpoint_densities(self, delta, parity: Optional[str] = None, min_epoch: int = 1) -> list:
        cps = self.checkpoints.get(as_rational(delta), [])
        return [c for c in cps if c.epoch >= min_epoch and (parity is None or c.parity == parity)]

    def restrict(self, grid: Iterable) -> "DFEstimate":
        """The same estimate on a subset of its grid."""
        keep = sorted({as_rational(d) for d in grid})
        idx = [self.index(d) for d in keep]
        return DFEstimate(tuple(keep), tuple(self.lower[i] for i in idx), tuple(self.upper[i] for i in idx),
                          self.horizon, self.window_start,
                          {d: v for d, v in self.checkpoints.items() if d in keep}, self.origin)

    @classmethod
    def from_functions(cls, lower: Callable, upper: Callable, grid: Sequence, origin: str = "analytic") -> "DFEstimate":
        grid = tuple(sorted(as_rational(d) for d in grid))
        return cls(grid, tuple(lower(d) for d in grid), tuple(upper(d) for d in grid),
                   horizon=0, window_start=0, origin=origin)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "lower", "upper", "checkpoint_m", "checkpoint_parity", "checkpoint_density"])
        for d, lo, up in zip(self.delta_grid, self.lower, self.upper):
            cps = self.checkpoints.get(d) or [None]
            for c in cps:
                row = [decimal_str(d), decimal_str(lo), decimal_str(up)]
                row += ["", "", ""] if c is None else [c.epoch, c.parity, decimal_str(c.density)]
                w.writerow(row)
        return buf.getvalue()


def _refine(counts: np.ndarray, ns: np.ndarray, cand: np.ndarray, want_min: bool) -> Fraction:
    c, n = counts[cand], ns[cand]
    if int(ns[-1]) >= 1 << 31:
        c, n = c.astype(object), n.astype(object)
    best = 0
    while True:
        lhs, rhs = c * n[best], c[best] * n
        better = np.flatnonzero(lhs < rhs if want_min else lhs > rhs)
        if not len(better):
            return Fraction(int(c[best]), int(n[best]))
        best = int(better[0])


def _exact_extremes(counts: np.ndarray, ns: np.ndarray) -> tuple:
    """Exact (min, max) of ``counts / ns``; floats only shortlist candidates.

    Distinct ratios with denominators below 2**31 differ by far more than
    float rounding, so everything within 1e-12 of the float extreme is kept.
    """
    f = counts / ns
    lo, hi = f.min(), f.max()
    low = np.flatnonzero(f <= lo + 1e-12)
    high = np.flatnonzero(f >= hi - 1e-12)
    return _refine(counts, ns, low, True), _refine(counts, ns, high, False)


def _one_delta(series: DistanceSeries, delta: Fraction, window_start: int, checkpoints: Sequence) -> tuple:
    horizon = len(series)
    lo_best = hi_best = None
    cp_counts = {}
    wanted = sorted({t for t, _ in checkpoints})
    run = 0
    for a in range(0, horizon, CHUNK):
        b = min(horizon, a + CHUNK)
        c = np.cumsum(series.below(delta, a, b), dtype=np.int64) + run
        run = int(c[-1])
        ns = np.arange(a + 1, b + 1, dtype=np.int64)
        for t in wanted:
            if a < t <= b:
                cp_counts[t] = int(c[t - a - 1])
        if b < window_start:
            continue
        off = max(0, window_start - a - 1)
        lo, hi = _exact_extremes(c[off:], ns[off:])
        lo_best = lo if lo_best is None else min(lo, lo_best)
        hi_best = hi if hi_best is None else max(hi, hi_best)
    cps = [Checkpoint(t, m, "even" if m % 2 == 0 else "odd", Fraction(cp_counts[t], t))
           for t, m in checkpoints if t in cp_counts]
    return lo_best, hi_best, cps


def estimate_df(series: DistanceSeries, grid: Iterable, window_start: Optional[int] = None,
                checkpoints: Sequence = ()) -> DFEstimate:
    """Tail-window extremes of the prefix densities for every ``delta`` in ``grid``.

    ``checkpoints`` holds ``(time, epoch)`` pairs; the density over the first
    ``time`` indices is recorded with the parity of ``epoch``.
    """
    grid = tuple(sorted({as_rational(d) for d in grid}))
    if not grid:
        raise ValueError("empty delta grid")
    if any(d <= 0 for d in grid):
        raise ValueError("grid points must be positive")
    horizon = len(series)
    if window_start is None:
        window_start = min(default_window(horizon), max(1, horizon // 2))
    if not 1 <= window_start <= horizon:
        raise ValueError(f"window_start={window_start} must lie in [1, {horizon}]")
    checkpoints = [(int(t), int(m)) for t, m in checkpoints]
    if any(not 1 <= t <= horizon for t, _ in checkpoints):
        raise ValueError("checkpoints must lie in [1, horizon]")
    work = lambda d: _one_delta(series, d, window_start, checkpoints)  # noqa: E731
    if threads() > 1 and len(grid) > 1:
        with ThreadPoolExecutor(threads()) as ex:
            results = list(ex.map(work, grid))
    else:
        results = [work(d) for d in grid]
    lower = tuple(r[0] for r in results)
    upper = tuple(r[1] for r in results)
    cps = {d: r[2] for d, r in zip(grid, results) if r[2]}
    return DFEstimate(grid, lower, upper, horizon, window_start, cps, origin=series.origin)


def df_at_zero(est: DFEstimate, tol=Fraction(1, 100)) -> tuple:
    """``(phi0_lower, phi0_upper, stable)`` read at the smallest grid point.

    Both functions are nondecreasing in delta, so the value at the smallest
    grid point bounds the limit at 0 from above; ``stable`` says the two
    smallest grid points agree to within ``tol``.
    """
    if len(est.delta_grid) < 2:
        return est.lower[0], est.upper[0], False
    tol = as_rational(tol)
    stable = abs(est.lower[1] - est.lower[0]) <= tol and abs(est.upper[1] - est.upper[0]) <= tol
    return est.lower[0], est.upper[0], stable


# ------------------------------------------------------- closed forms


def _interval_hit_length(z: Fraction, delta: Fraction, lo=0, hi=1) -> Fraction:
    return max(Fraction(0), min(Fraction(hi), z + delta) - max(Fraction(lo), z - delta))


def phi_e(delta) -> Fraction:
    return Fraction(0) if as_rational(delta) <= 2 else Fraction(1)


def phi_o(delta) -> Fraction:
    d = as_rational(delta)
    if d <= 1:
        return Fraction(0)
    if d <= 3:
        return (d - 1) / 2
    return Fraction(1)


def psi_yz(delta) -> Fraction:
    # y and z stay between 3 and 5 apart, so nothing is counted below 3
    d = as_rational(delta)
    if d <= 3:
        return Fraction(0)
    if d <= 5:
        return (d - 3) / 2
    return Fraction(1)


def psi_xy(delta) -> Fraction:
    return (phi_e(delta) + phi_o(delta)) / 2


ANALYTIC_IDS = ("O1-fixed", "phi_e", "phi_o", "psi_yz", "psi_xy")


def analytic_df(id: str, delta, z=None) -> Fraction:
    d = as_rational(delta)
    if d <= 0:
        raise ValueError("delta must be positive")
    if id == "O1-fixed":
        if z is None:
            raise ValueError("O1-fixed needs the fixed coordinate z")
        return _interval_hit_length(as_rational(z), d)
    table = {"phi_e": phi_e, "phi_o": phi_o, "psi_yz": psi_yz, "psi_xy": psi_xy}
    if id not in table:
        raise ValueError(f"unknown analytic id {id!r}; expected one of {ANALYTIC_IDS}")
    return table[id](d)


def oscillation_hits(m: int, z, delta, schedule=None) -> tuple:
    """Hits ``|x - z| < delta`` of the O1 orbit of ``[1, 1]`` over one full
    cycle of epoch ``m``, and whether ``|J| 2m - 2 <= P_m <= |J| 2m + 2``."""
    from .numerics import moving
    from .oscillators import EpochSchedule, OscillatorSystem, _plan

    if m < 1:
        raise ValueError("m must be >= 1")
    z, d = as_rational(z), as_rational(delta)
    if not 0 <= z <= 1:
        raise ValueError("z must lie in [0, 1]")
    if d <= 0:
        raise ValueError("delta must be positive")
    schedule = schedule or EpochSchedule()
    # the orbit of [1, 1] sits at 1 at time s_m; the first cycle fills s_m+1 .. s_m+2m
    start = schedule.s(m)
    plan = _plan(OscillatorSystem("O1", schedule), moving(1), start + 2 * m + 1)
    num, den = plan.window(start + 1, start + 2 * m + 1)
    hits = sum(1 for a, b in zip(num.tolist(), den.tolist()) if abs(Fraction(a, b) - z) < d)
    J = _interval_hit_length(z, d)
    ok = J * 2 * m - 2 <= hits <= J * 2 * m + 2
    return hits, ok
