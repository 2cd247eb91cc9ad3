"""Exact scalars, ladder points, the max-metric and distance series.

Every real quantity in the package is a :class:`fractions.Fraction`.  Long
distance series are kept as integer numpy arrays (numerator/denominator, or a
dyadic exponent for shift spaces) so that comparisons against a threshold stay
exact while remaining vectorised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

Rational = Fraction
Number = Union[int, Fraction, str]

# products below this bound are safe in int64
_INT64_SAFE = 1 << 62


def as_rational(value: Number) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to a Fraction.

    Floats are refused: they would smuggle rounding into exact code paths.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected int, Fraction or str, got {type(value).__name__}")


@dataclass(frozen=True)
class LadderPoint:
    """A point ``[coord, 1/k]`` (moving, ``level=k``) or ``[coord, 0]`` (fixed)."""

    coord: Fraction
    level: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "coord", as_rational(self.coord))
        if self.level is not None:
            if isinstance(self.level, bool) or not isinstance(self.level, (int, np.integer)):
                raise TypeError("level must be an integer or None")
            if self.level < 1:
                raise ValueError(f"moving level must be >= 1, got {self.level}")
            object.__setattr__(self, "level", int(self.level))

    @property
    def fixed(self) -> bool:
        return self.level is None

    @property
    def second(self) -> Fraction:
        return Fraction(0) if self.level is None else Fraction(1, self.level)

    def __repr__(self) -> str:
        lvl = "Fixed" if self.level is None else f"Moving({self.level})"
        return f"[{self.coord}, {lvl}]"


def moving(coord: Number, k: int = 1) -> LadderPoint:
    return LadderPoint(as_rational(coord), k)


def fixed(coord: Number) -> LadderPoint:
    return LadderPoint(as_rational(coord), None)


def max_metric(p: LadderPoint, q: LadderPoint) -> Fraction:
    return max(abs(p.coord - q.coord), abs(p.second - q.second))


def orbit(system, p, horizon: int) -> list:
    """``[p, f(p), ..., f^(horizon-1)(p)]`` by literal stepping."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    system.check_point(p)
    out = [p]
    for _ in range(horizon - 1):
        p = system.step(p)
        out.append(p)
    return out


def distance_series(system, p, q, horizon: int) -> "DistanceSeries":
    """Exact ``d(f^i p, f^i q)`` for ``i < horizon``.

    Uses the system's vectorised path when it has one; otherwise steps both
    orbits literally.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    system.check_point(p)
    system.check_point(q)
    fast = getattr(system, "pair_series", None)
    if fast is not None:
        return fast(p, q, horizon)
    return literal_distance_series(system, p, q, horizon)


def literal_distance_series(system, p, q, horizon: int) -> "DistanceSeries":
    origin = f"{system!r}: {p!r} vs {q!r} (literal)"
    values = []
    for _ in range(horizon):
        values.append(system.distance(p, q))
        p, q = system.step(p), system.step(q)
    return RationalSeries.from_fractions(values, origin=origin)


class DistanceSeries:
    """Sequence of exact non-negative distances indexed from 0."""

    origin: str = ""

    def __len__(self) -> int:
        raise NotImplementedError

    def __getitem__(self, i):
        raise NotImplementedError

    def below(self, delta: Number, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
        """Boolean mask of ``values[i] < delta`` for ``start <= i < stop``."""
        raise NotImplementedError

    def subsample(self, N: int, offset: int = 0) -> "DistanceSeries":
        raise NotImplementedError

    def head(self, n: int) -> "DistanceSeries":
        return self._truncate(n)

    def _truncate(self, n: int) -> "DistanceSeries":
        raise NotImplementedError

    @property
    def values(self) -> list:
        return [self[i] for i in range(len(self))]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def _bounds(self, start: int, stop: Optional[int]) -> tuple:
        n = len(self)
        stop = n if stop is None else stop
        if not 0 <= start <= stop <= n:
            raise IndexError(f"window [{start}, {stop}) outside series of length {n}")
        return start, stop


class RationalSeries(DistanceSeries):
    """Distances ``num[i] / den[i]`` held in integer arrays (int64 or object)."""

    def __init__(self, num: np.ndarray, den: np.ndarray, origin: str = ""):
        num = np.asarray(num)
        den = np.asarray(den)
        if num.shape != den.shape or num.ndim != 1:
            raise ValueError("num and den must be 1-d arrays of equal length")
        self.num = num
        self.den = den
        self.origin = origin

    @classmethod
    def from_fractions(cls, values: Iterable[Number], origin: str = "") -> "RationalSeries":
        fr = [as_rational(v) for v in values]
        if any(v < 0 for v in fr):
            raise ValueError("distances must be non-negative")
        nums = [v.numerator for v in fr]
        dens = [v.denominator for v in fr]
        big = max(nums + dens, default=0) >= _INT64_SAFE
        dtype = object if big else np.int64
        return cls(np.array(nums, dtype=dtype), np.array(dens, dtype=dtype), origin)

    def __len__(self) -> int:
        return len(self.num)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return Fraction(int(self.num[i]), int(self.den[i]))

    def below(self, delta, start=0, stop=None):
        start, stop = self._bounds(start, stop)
        d = as_rational(delta)
        num = self.num[start:stop]
        den = self.den[start:stop]
        if num.dtype != object and len(num):
            if int(num.max()) * d.denominator < _INT64_SAFE and d.numerator * int(den.max()) < _INT64_SAFE:
                return num * d.denominator < den * d.numerator
            num, den = num.astype(object), den.astype(object)
        if not len(num):
            return np.zeros(0, dtype=bool)
        return np.asarray(num * d.denominator < den * d.numerator, dtype=bool)

    def subsample(self, N, offset=0):
        if N < 1 or offset < 0:
            raise ValueError("need N >= 1 and offset >= 0")
        return RationalSeries(self.num[offset::N], self.den[offset::N], f"{self.origin} [::{N}, +{offset}]")

    def _truncate(self, n):
        return RationalSeries(self.num[:n], self.den[:n], self.origin)


class DyadicSeries(DistanceSeries):
    """Distances ``2**-exp[i]``; ``exp[i] < 0`` encodes distance 0."""

    def __init__(self, exp: np.ndarray, origin: str = ""):
        self.exp = np.asarray(exp, dtype=np.int64)
        self.origin = origin

    def __len__(self):
        return len(self.exp)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        r = int(self.exp[i])
        return Fraction(0) if r < 0 else Fraction(1, 1 << r)

    def below(self, delta, start=0, stop=None):
        start, stop = self._bounds(start, stop)
        d = as_rational(delta)
        e = self.exp[start:stop]
        if d <= 0:
            return np.zeros(len(e), dtype=bool)
        # 2**-r < p/q  <=>  q < p * 2**r ; find the least such r >= 0
        p, q = d.numerator, d.denominator
        r_min = 0
        while p << r_min <= q:
            r_min += 1
        return (e < 0) | (e >= r_min)

    def subsample(self, N, offset=0):
        if N < 1 or offset < 0:
            raise ValueError("need N >= 1 and offset >= 0")
        return DyadicSeries(self.exp[offset::N], f"{self.origin} [::{N}, +{offset}]")

    def _truncate(self, n):
        return DyadicSeries(self.exp[:n], self.origin)


def series_equal(a: DistanceSeries, b: DistanceSeries) -> bool:
    """Exact elementwise equality, independent of representation."""
    if len(a) != len(b):
        return False
    return all(a[i] == b[i] for i in range(len(a)))


def fraction_arrays(values: Sequence[Fraction]) -> tuple:
    return (np.array([v.numerator for v in values], dtype=np.int64),
            np.array([v.denominator for v in values], dtype=np.int64))
