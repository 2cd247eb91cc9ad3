"""Oscillator systems O1, O2, their union G and the reflected system H.

A moving point ``[x, 1/k]`` applies the map scheduled for step ``k`` and
descends to level ``k+1``; fixed points ``[x, 0]`` never move.  Steps are
grouped into epochs ``(s_m, s_{m+1}]`` of ``n_m`` down-up cycles of length
``2m`` at speed ``1/m``.

Two routes compute orbits.  :meth:`OscillatorSystem.step` applies the
piecewise maps literally.  :meth:`OscillatorSystem.pair_series` builds the
same orbits epoch by epoch, exploiting that after one complete half-cycle a
track sits on an endpoint and every remaining cycle of the epoch repeats.
The test-suite checks one route against the other.
"""

from __future__ import annotations

import bisect
import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np

from .numerics import LadderPoint, RationalSeries, as_rational, max_metric

PRESETS = ("dominant", "paper-literal")

INTERVALS = {"I": (0, 1), "K": (2, 3), "J": (-2, -1)}


class MapFamily(str, enum.Enum):
    G = "g"
    G_HAT = "g^"
    H = "h"
    H_HAT = "h^"
    L = "l"
    L_HAT = "l^"
    ID = "id"


# family -> (interval, direction); every non-identity map is a clamped +-1/m shift
_MOVES = {
    MapFamily.G: ("I", -1),
    MapFamily.G_HAT: ("I", 1),
    MapFamily.H: ("K", -1),
    MapFamily.H_HAT: ("K", 1),
    MapFamily.L: ("J", -1),
    MapFamily.L_HAT: ("J", 1),
}


def interval_of(x: Fraction) -> Optional[str]:
    for name, (lo, hi) in INTERVALS.items():
        if lo <= x <= hi:
            return name
    return None


def piecewise_map(family: MapFamily, m: int, x) -> Fraction:
    family = MapFamily(family)
    x = as_rational(x)
    if m < 1:
        raise ValueError("m must be >= 1")
    if family is MapFamily.ID:
        if interval_of(x) is None:
            raise ValueError(f"{x} lies outside I, K and J")
        return x
    name, direction = _MOVES[family]
    lo, hi = INTERVALS[name]
    if not lo <= x <= hi:
        raise ValueError(f"{family.value}_{m} is defined on [{lo}, {hi}], got {x}")
    if direction < 0:
        return max(x - Fraction(1, m), Fraction(lo))
    return min(x + Fraction(1, m), Fraction(hi))


# ---------------------------------------------------------------- schedule

_S_TABLES: dict = {}
_S_LOCK = threading.Lock()


@dataclass(frozen=True)
class EpochSchedule:
    """Epoch lengths ``2 m n_m`` and cumulative starts ``s_m`` (``s_1 = 0``).

    ``dominant`` takes ``n_m = max(m, m*s_m)`` so the running epoch dominates
    every time average; ``paper-literal`` takes ``n_m = m``.
    """

    preset: str = "dominant"

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; expected one of {PRESETS}")

    def n(self, m: int) -> int:
        if m < 1:
            raise ValueError("epochs are numbered from 1")
        if self.preset == "dominant":
            return max(m, m * self.s(m))
        return m

    def s(self, m: int) -> int:
        if m < 1:
            raise ValueError("epochs are numbered from 1")
        table = self._table()
        if len(table) <= m:
            with _S_LOCK:
                while len(table) <= m:
                    j = len(table) - 1
                    table.append(table[j] + 2 * j * self._n_from(table, j))
        return table[m]

    def _table(self) -> list:
        # index 0 is a placeholder so that table[m] == s_m
        return _S_TABLES.setdefault(self.preset, [0, 0])

    def _n_from(self, table: list, j: int) -> int:
        return max(j, j * table[j]) if self.preset == "dominant" else j

    def epoch_of(self, k: int) -> int:
        """The ``m`` with ``s_m < k <= s_{m+1}``."""
        if k < 1:
            raise ValueError("step indices start at 1")
        m = 1
        while self.s(m + 1) < k:
            m += 1
        return m

    def horizon(self, m_max: int) -> int:
        """Number of orbit points covering epochs ``1..m_max``: ``s_{m_max+1}``."""
        return self.s(m_max + 1)

    def checkpoints(self, horizon: int) -> list:
        """Epoch ends ``s_{m+1}`` within ``[1, horizon]`` as ``(time, m)``."""
        out = []
        m = 1
        while self.s(m + 1) <= horizon:
            out.append((self.s(m + 1), m))
            m += 1
        return out


def epoch_bounds(schedule: EpochSchedule, k: int) -> tuple:
    """Decompose step ``k`` as ``s_m + 2*m*i + r`` with ``1 <= r <= 2m``."""
    m = schedule.epoch_of(k)
    i, r0 = divmod(k - schedule.s(m) - 1, 2 * m)
    return m, i, r0 + 1


TRACKS = ("f", "fhat", "ftilde")


def _halves(track: str, m: int, i: int) -> tuple:
    """Map families of the two half-cycles of cycle ``i`` in epoch ``m``."""
    if track == "f":
        return MapFamily.G, MapFamily.G_HAT
    odd = m % 2 == 1
    if track == "fhat":
        down, up = MapFamily.H, MapFamily.H_HAT
        if i == 0:
            return MapFamily.ID, (down if odd else up)
        return (up, down) if odd else (down, up)
    if track == "ftilde":
        down, up = MapFamily.L, MapFamily.L_HAT
        if i == 0:
            return MapFamily.ID, (up if odd else down)
        return (down, up) if odd else (up, down)
    raise ValueError(f"unknown track {track!r}")


def schedule_map(track: str, schedule: EpochSchedule, k: int) -> tuple:
    m, i, r = epoch_bounds(schedule, k)
    first, second = _halves(track, m, i)
    return (first if r <= m else second), m


def mirror(p: LadderPoint) -> LadderPoint:
    return LadderPoint(1 - p.coord, p.level)


# ----------------------------------------------------------------- systems

_SPACES = {"O1": ("I",), "O2": ("K",), "G": ("I", "K"), "H": ("I", "K", "J")}


@dataclass(frozen=True)
class OscillatorSystem:
    id: str
    schedule: EpochSchedule = EpochSchedule()

    def __post_init__(self):
        if self.id not in _SPACES:
            raise ValueError(f"unknown system {self.id!r}; expected one of {tuple(_SPACES)}")

    def __repr__(self):
        return f"{self.id}[{self.schedule.preset}]"

    @property
    def intervals(self) -> tuple:
        return _SPACES[self.id]

    @property
    def diam(self) -> Fraction:
        los = [INTERVALS[n][0] for n in self.intervals]
        his = [INTERVALS[n][1] for n in self.intervals]
        # the ladder {1/k} u {0} has diameter 1
        return Fraction(max(max(his) - min(los), 1))

    def contains(self, p) -> bool:
        return isinstance(p, LadderPoint) and interval_of(p.coord) in self.intervals

    def check_point(self, p) -> None:
        if not self.contains(p):
            raise ValueError(f"{p!r} is not a point of {self.id} (intervals {self.intervals})")

    def distance(self, p: LadderPoint, q: LadderPoint) -> Fraction:
        return max_metric(p, q)

    def track_of(self, coord: Fraction) -> str:
        name = interval_of(coord)
        if name not in self.intervals:
            raise ValueError(f"{coord} is outside the space of {self.id}")
        return {"I": "f", "K": "fhat", "J": "ftilde"}[name]

    def step(self, p: LadderPoint) -> LadderPoint:
        self.check_point(p)
        if p.fixed:
            return p
        k = p.level
        track = self.track_of(p.coord)
        family, m = schedule_map(track, self.schedule, k)
        x = piecewise_map(family, m, p.coord)
        if self.id == "H" and track != "f":
            x = 1 - x
        return LadderPoint(x, k + 1)

    def pair_series(self, p: LadderPoint, q: LadderPoint, horizon: int, chunk: int = 1 << 22) -> RationalSeries:
        """Vectorised exact distance series; agrees with literal stepping."""
        self.check_point(p)
        self.check_point(q)
        a = _plan(self, p, horizon)
        b = _plan(self, q, horizon)
        same_level = p.level == q.level
        dtype = np.int64
        if not same_level and not p.fixed and not q.fixed:
            dtype = object  # |1/k1 - 1/k2| has a quadratic denominator
        num = np.empty(horizon, dtype=dtype)
        den = np.empty(horizon, dtype=dtype)
        for t0 in range(0, horizon, chunk):
            t1 = min(horizon, t0 + chunk)
            an, ad = a.window(t0, t1)
            bn, bd = b.window(t0, t1)
            if dtype is object:
                an, ad, bn, bd = (v.astype(object) for v in (an, ad, bn, bd))
            cn = np.abs(an * bd - bn * ad)
            cd = ad * bd
            ln, ld = _ladder_gap(p.level, q.level, t0, t1, dtype)
            take_ladder = ln * cd > cn * ld
            num[t0:t1] = np.where(take_ladder, ln, cn)
            den[t0:t1] = np.where(take_ladder, ld, cd)
        return RationalSeries(num, den, origin=f"{self!r}: {p!r} vs {q!r}")


def _ladder_gap(k1, k2, t0, t1, dtype):
    t = np.arange(t0, t1, dtype=np.int64)
    if k1 is None and k2 is None:
        return np.zeros(t1 - t0, dtype=dtype), np.ones(t1 - t0, dtype=dtype)
    if k1 is None or k2 is None:
        k = k1 if k2 is None else k2
        return np.ones(t1 - t0, dtype=dtype), (k + t).astype(dtype)
    if k1 == k2:
        return np.zeros(t1 - t0, dtype=dtype), np.ones(t1 - t0, dtype=dtype)
    a = (k1 + t).astype(object)
    b = (k2 + t).astype(object)
    return np.full(t1 - t0, abs(k1 - k2), dtype=object), a * b


# ------------------------------------------------------- vectorised tracks


class _Segment:
    __slots__ = ("t0", "length", "values", "den", "periodic")

    def __init__(self, t0, length, values, den, periodic):
        self.t0, self.length, self.values, self.den, self.periodic = t0, length, values, den, periodic


class TrackPlan:
    """First coordinates of one orbit at times ``0..horizon-1``, compressed.

    Coordinates are stored in a frame where the track never reflects; for H
    points on K or J the real coordinate is ``1 - u`` on alternate steps.
    """

    def __init__(self, horizon: int, flip_start: Optional[bool]):
        self.horizon = horizon
        self.segments: list = []
        self.flip_start = flip_start  # None: no reflection

    def add(self, t0, values, den, periodic_count=None):
        if periodic_count is None:
            self.segments.append(_Segment(t0, len(values), values, den, False))
        else:
            self.segments.append(_Segment(t0, len(values) * periodic_count, values, den, True))

    def window(self, t0: int, t1: int) -> tuple:
        num = np.empty(t1 - t0, dtype=np.int64)
        den = np.empty(t1 - t0, dtype=np.int64)
        starts = [s.t0 for s in self.segments]
        j = max(0, bisect.bisect_right(starts, t0) - 1)
        while j < len(self.segments) and self.segments[j].t0 < t1:
            seg = self.segments[j]
            a = max(t0, seg.t0)
            b = min(t1, seg.t0 + seg.length)
            if a < b:
                if seg.periodic:
                    idx = (np.arange(a, b, dtype=np.int64) - seg.t0) % len(seg.values)
                    num[a - t0:b - t0] = seg.values[idx]
                else:
                    num[a - t0:b - t0] = seg.values[a - seg.t0:b - seg.t0]
                den[a - t0:b - t0] = seg.den
            j += 1
        if self.flip_start is not None:
            t = np.arange(t0, t1, dtype=np.int64)
            flip = (t % 2 == 1) != self.flip_start
            num = np.where(flip, den - num, num)
        return num, den


def _plan(system: OscillatorSystem, p: LadderPoint, horizon: int) -> TrackPlan:
    if p.fixed:
        plan = TrackPlan(horizon, None)
        c = p.coord
        plan.add(0, np.array([c.numerator], dtype=np.int64), c.denominator, periodic_count=horizon)
        return plan
    track = system.track_of(p.coord)
    u = p.coord
    flip_start = None
    if system.id == "H" and track != "f":
        # fold J onto K: 1 - f~_k(1 - u) == f^_k(u)
        flip_start = track == "ftilde"
        if track == "ftilde":
            u = 1 - u
        track = "fhat"
    plan = TrackPlan(horizon, flip_start)
    plan.add(0, np.array([u.numerator], dtype=np.int64), u.denominator)
    _fill(plan, track, system.schedule, u, p.level, horizon)
    return plan


def _run(state: Fraction, family: MapFamily, m: int, length: int) -> tuple:
    """Positions after ``length`` applications of one map, as (num, den)."""
    D = lcm(state.denominator, m)
    a = state.numerator * (D // state.denominator)
    if family is MapFamily.ID:
        return np.full(length, a, dtype=np.int64), D
    name, direction = _MOVES[family]
    lo, hi = INTERVALS[name]
    j = np.arange(1, length + 1, dtype=np.int64)
    vals = a + direction * j * (D // m)
    return np.clip(vals, lo * D, hi * D), D


def _fill(plan: TrackPlan, track: str, schedule: EpochSchedule, state: Fraction, k0: int, horizon: int) -> None:
    # positions at times 1..horizon-1 come from steps k0..k0+horizon-2
    k_last = k0 + horizon - 2
    k = k0
    while k <= k_last:
        m = schedule.epoch_of(k)
        s_m, n_m = schedule.s(m), schedule.n(m)
        epoch_end = min(schedule.s(m + 1), k_last)
        while k <= epoch_end:
            i, pos = divmod(k - s_m - 1, 2 * m)
            t = k - k0 + 1
            if pos == 0 and i >= 1:
                cycles = min(n_m - i, (epoch_end - k + 1) // (2 * m))
                if cycles >= 2:
                    first, second = _halves(track, m, i)
                    v1, d1 = _run(state, first, m, m)
                    end1 = Fraction(int(v1[-1]), d1)
                    v2, d2 = _run(end1, second, m, m)
                    end2 = Fraction(int(v2[-1]), d2)
                    if end2 == state:
                        D = lcm(d1, d2)
                        pattern = np.concatenate([v1 * (D // d1), v2 * (D // d2)])
                        plan.add(t, pattern, D, periodic_count=cycles)
                        k += cycles * 2 * m
                        continue
            first, second = _halves(track, m, i)
            family = first if pos < m else second
            half_end = s_m + 2 * m * i + (m if pos < m else 2 * m)
            stop = min(half_end, epoch_end)
            vals, D = _run(state, family, m, stop - k + 1)
            plan.add(t, vals, D)
            state = Fraction(int(vals[-1]), D)
            k = stop + 1
