"""Binary full-shift points built from run-length rules.

A :class:`BlockSpec` names a rule (plus parameters) that yields runs
``(symbol, length)``; a :class:`ShiftPoint` is the resulting sequence viewed
from some offset.  The metric is ``2**-r`` with ``r`` the first index where
two sequences differ, so for ``v = 000...`` and ``delta`` in ``(1/2, 1]`` a
distance below ``delta`` is exactly the event ``u_i == 0``.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterator, Optional

import numpy as np

from .numerics import DyadicSeries, as_rational

LOOKAHEAD = 64


class DegeneratePairError(ValueError):
    """Both points of a pair are the same sequence."""


def _frac(v) -> Fraction:
    return as_rational(v)


def _runs_constant(params, start) -> Iterator:
    L = int(params.get("length", 1))
    sym = start
    while True:
        yield sym, L
        sym ^= 1


def _runs_power(params, start):
    base = int(params["base"])
    sym, j = start, 1
    while True:
        yield sym, base ** j
        sym ^= 1
        j += 1


def _runs_double_power(params, start):
    sym, j = start, 1
    while True:
        yield sym, 2 ** (2 ** j)
        sym ^= 1
        j += 1


def _runs_zeros(params, start):
    while True:
        yield 0, 1 << 40


def _runs_prefix(params, start):
    """The literal symbols in ``params["symbols"]`` followed by zeros."""
    for ch in str(params["symbols"]):
        yield int(ch), 1
    while True:
        yield 0, 1 << 40


def _runs_density_targets(params, start):
    """Each run is the shortest one pushing the prefix zero-density past a target.

    Zero-runs aim at ``high_j = 1 - (1 - high0) * shrink**j``, one-runs at
    ``low_j = low0 * shrink**j``; ``shrink = 1`` keeps fixed targets.
    """
    low0, high0 = _frac(params["low"]), _frac(params["high"])
    shrink = _frac(params.get("shrink", 1))
    seed = int(params.get("seed", 1))
    if not 0 < low0 < high0 < 1 or not 0 < shrink <= 1:
        raise ValueError("need 0 < low < high < 1 and 0 < shrink <= 1")
    n = seed
    zeros = seed if start == 0 else 0
    yield start, seed
    sym = start ^ 1
    j_low = j_high = 0
    while True:
        if sym == 0:
            target = 1 - (1 - high0) * shrink ** j_high
            j_high += 1
            # (zeros + L) / (n + L) >= target
            L = max(1, ceil((target * n - zeros) / (1 - target)))
            zeros += L
        else:
            target = low0 * shrink ** j_low
            j_low += 1
            # zeros / (n + L) <= target
            L = max(1, ceil(zeros / target - n))
        n += L
        yield sym, L
        sym ^= 1


def _runs_coded_blocks(params, start):
    """Block ``j`` spans ``(g**(j-1), g**j]``; block types cycle through
    ``bit 0, ..., bit b-1, all-zero`` and carry the matching bit of ``code``."""
    code, bits, growth = int(params["code"]), int(params["bits"]), int(params.get("growth", 3))
    period = bits + 1
    yield (code & 1), 1
    j, n = 1, 1
    while True:
        L = growth ** j - n
        kind = j % period
        sym = 0 if kind == bits else (code >> kind) & 1
        yield sym, L
        n += L
        j += 1


RULES = {
    "constant": _runs_constant,
    "power": _runs_power,
    "double_power": _runs_double_power,
    "zeros": _runs_zeros,
    "prefix": _runs_prefix,
    "density_targets": _runs_density_targets,
    "coded_blocks": _runs_coded_blocks,
}


@dataclass(frozen=True)
class BlockSpec:
    rule: str
    params: dict = field(default_factory=dict, hash=False, compare=True)
    start_symbol: int = 0

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}; expected one of {sorted(RULES)}")
        if self.start_symbol not in (0, 1):
            raise ValueError("start_symbol must be 0 or 1")

    def __hash__(self):
        return hash(self.to_json())

    def runs(self) -> Iterator:
        for sym, L in RULES[self.rule](self.params, self.start_symbol):
            if L < 1:
                raise ValueError(f"rule {self.rule} produced a run of length {L}")
            yield sym, L

    def to_dict(self) -> dict:
        return {"rule": self.rule, "params": {k: str(v) for k, v in self.params.items()},
                "start_symbol": self.start_symbol}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BlockSpec":
        return cls(d["rule"], dict(d.get("params", {})), int(d.get("start_symbol", 0)))


def block_sequence(spec: BlockSpec, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    out = np.empty(n, dtype=np.int8)
    pos = 0
    for sym, L in spec.runs():
        take = min(L, n - pos)
        out[pos:pos + take] = sym
        pos += take
        if pos == n:
            return out
    raise AssertionError("run generators are infinite")


class _Prefix:
    """Thread-safe lazily grown prefix of one BlockSpec sequence."""

    def __init__(self, spec: BlockSpec):
        self.spec = spec
        self.data = np.zeros(0, dtype=np.int8)
        self.lock = threading.Lock()

    def get(self, n: int) -> np.ndarray:
        if len(self.data) < n:
            with self.lock:
                if len(self.data) < n:
                    self.data = block_sequence(self.spec, max(n, 2 * len(self.data)))
        return self.data[:n]


_PREFIXES: dict = {}
_PREFIX_LOCK = threading.Lock()


def _prefix_store(spec: BlockSpec) -> _Prefix:
    key = spec.to_json()
    with _PREFIX_LOCK:
        if key not in _PREFIXES:
            _PREFIXES[key] = _Prefix(spec)
        return _PREFIXES[key]


@dataclass(frozen=True)
class ShiftPoint:
    spec: BlockSpec
    offset: int = 0

    def symbols(self, n: int) -> np.ndarray:
        return _prefix_store(self.spec).get(self.offset + n)[self.offset:]

    def shifted(self, j: int = 1) -> "ShiftPoint":
        return ShiftPoint(self.spec, self.offset + j)

    def __repr__(self):
        tail = f"+{self.offset}" if self.offset else ""
        return f"<{self.spec.rule}{tail}>"


def zeros_point() -> ShiftPoint:
    return ShiftPoint(BlockSpec("zeros"))


def _first_difference(u: np.ndarray, v: np.ndarray, horizon: int) -> np.ndarray:
    """For ``i < horizon``: offset to the first ``k >= i`` with ``u_k != v_k``,
    or -1 if none within ``LOOKAHEAD`` symbols."""
    diff = u != v
    idx = np.where(diff, np.arange(len(diff), dtype=np.int64), np.iinfo(np.int64).max)
    nxt = np.minimum.accumulate(idx[::-1])[::-1][:horizon]
    r = nxt - np.arange(horizon, dtype=np.int64)
    return np.where(r < LOOKAHEAD, r, -1)


def shift_distance(u: ShiftPoint, v: ShiftPoint, i: int) -> Fraction:
    if i < 0:
        raise ValueError("i must be >= 0")
    a = u.symbols(i + LOOKAHEAD)[i:]
    b = v.symbols(i + LOOKAHEAD)[i:]
    r = int(_first_difference(a, b, 1)[0])
    return Fraction(0) if r < 0 else Fraction(1, 1 << r)


class ZeroDensityProfile:
    """Prefix zero-densities ``#{i < n : u_i = 0} / n`` for ``n = 1..horizon``."""

    def __init__(self, zero_counts: np.ndarray):
        self.counts = zero_counts

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, j):
        if isinstance(j, slice):
            return [self[i] for i in range(*j.indices(len(self)))]
        if j < 0:
            j += len(self)
        return Fraction(int(self.counts[j]), j + 1)

    def __iter__(self):
        for j in range(len(self)):
            yield self[j]

    def tail_extremes(self, window_start: int) -> tuple:
        """Exact (min, max) over prefix lengths ``n`` in ``[window_start, horizon]``."""
        ns = np.arange(1, len(self) + 1, dtype=np.int64)
        lo = max(window_start, 1) - 1
        c, n = self.counts[lo:], ns[lo:]
        f = c / n
        out = []
        for pick in (np.argmin, np.argmax):
            i = int(pick(f))
            near = np.nonzero(np.abs(f - f[i]) <= 1e-12)[0]
            vals = {Fraction(int(c[j]), int(n[j])) for j in near}
            out.append(min(vals) if pick is np.argmin else max(vals))
        return tuple(out)


def zero_density_profile(u: ShiftPoint, horizon: int) -> ZeroDensityProfile:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return ZeroDensityProfile(np.cumsum(u.symbols(horizon) == 0, dtype=np.int64))


DC_KINDS = ("DC1", "DC2.5-strict")


@dataclass(frozen=True)
class ShiftPair:
    u: ShiftPoint
    v: ShiftPoint
    expected: Optional[tuple] = None  # (liminf, limsup) of zero density when v = 000...

    def __post_init__(self):
        if self.u == self.v:
            raise DegeneratePairError("u and v are the same sequence; not a scrambled pair")


def make_dc_pair(kind: str) -> ShiftPair:
    """Pair ``(u, 000...)`` whose zero-density oscillates as the class demands.

    ``DC1``: one-runs push the density down to ``1/2, 1/8, 1/32, ...`` and
    zero-runs up to ``3/4, 15/16, 63/64, ...``.  ``DC2.5-strict``: the density
    swings exactly between ``1/4`` and ``3/4``.
    """
    if kind == "DC1":
        spec = BlockSpec("density_targets", {"low": "1/2", "high": "3/4", "shrink": "1/4", "seed": "1"}, 0)
        expected = (Fraction(0), Fraction(1))
    elif kind in ("DC2.5-strict", "DC2½-strict"):
        spec = BlockSpec("density_targets", {"low": "1/4", "high": "3/4", "shrink": "1", "seed": "1"}, 0)
        expected = (Fraction(1, 4), Fraction(3, 4))
    else:
        raise ValueError(f"unknown kind {kind!r}; expected one of {DC_KINDS}")
    return ShiftPair(ShiftPoint(spec), zeros_point(), expected)


def coded_shift_set(bits: int = 3, growth: int = 3) -> list:
    """``2**bits`` points whose pairwise agreement density oscillates."""
    return [ShiftPoint(BlockSpec("coded_blocks", {"code": str(c), "bits": str(bits), "growth": str(growth)}))
            for c in range(2 ** bits)]


class ShiftSystem:
    """The full shift on two symbols, metric ``2**-(first difference)``."""

    id = "shift"
    diam = Fraction(1)

    def __repr__(self):
        return "shift"

    def __eq__(self, other):
        return isinstance(other, ShiftSystem)

    def __hash__(self):
        return hash("shift")

    def contains(self, p) -> bool:
        return isinstance(p, ShiftPoint)

    def check_point(self, p) -> None:
        if not self.contains(p):
            raise ValueError(f"{p!r} is not a shift point")

    def step(self, p: ShiftPoint) -> ShiftPoint:
        return p.shifted(1)

    def distance(self, p: ShiftPoint, q: ShiftPoint) -> Fraction:
        return shift_distance(p, q, 0)

    def pair_series(self, p: ShiftPoint, q: ShiftPoint, horizon: int) -> DyadicSeries:
        u = p.symbols(horizon + LOOKAHEAD)
        v = q.symbols(horizon + LOOKAHEAD)
        return DyadicSeries(_first_difference(u, v, horizon), origin=f"shift: {p!r} vs {q!r}")
