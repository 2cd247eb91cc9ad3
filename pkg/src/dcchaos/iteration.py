"""Iterates ``f^N``, the counting inequalities behind iteration invariance,
and the DC2½ / DC3 iteration experiments."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .classifier import DEFAULT_TAU, ChaosVerdict, classify
from .distribution import default_grid, estimate_df, prefix_counts
from .numerics import DistanceSeries, as_rational, moving
from .oscillators import EpochSchedule, OscillatorSystem
from .shifts import ShiftSystem

CLAUSES = ("i", "ii", "iii", "iv")


def subsample_series(series: DistanceSeries, N: int, offset: int = 0) -> DistanceSeries:
    """``values[offset], values[offset + N], ...``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return series.subsample(N, offset)


@dataclass(frozen=True)
class IterateHandle:
    """``base`` iterated ``N`` times per step."""

    base: object
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")

    def __repr__(self):
        return f"{self.base!r}^{self.N}"

    @property
    def diam(self):
        return self.base.diam

    def contains(self, p) -> bool:
        return self.base.contains(p)

    def check_point(self, p) -> None:
        self.base.check_point(p)

    def distance(self, p, q):
        return self.base.distance(p, q)

    def step(self, p):
        for _ in range(self.N):
            p = self.base.step(p)
        return p

    def pair_series(self, p, q, horizon: int) -> DistanceSeries:
        base = self.base.pair_series(p, q, self.N * (horizon - 1) + 1)
        return base.subsample(self.N)


def power_system(system, N: int) -> IterateHandle:
    return IterateHandle(system, N)


def default_modulus(system, s, N: int) -> Fraction:
    """The ``t`` paired with ``s`` in the counting inequalities.

    Oscillators use ``t = s``; one shift step at most doubles the shift
    metric, so ``t = s / 2**(N-1)`` there.
    """
    s = as_rational(s)
    if isinstance(system, IterateHandle):
        system = system.base
    if isinstance(system, ShiftSystem):
        return s / (1 << (N - 1))
    return s


# ------------------------------------------------- counting inequalities


@dataclass
class Lemma1Report:
    clause: str
    N: int
    s: Fraction
    t: Fraction
    checked: int
    first_violation: Optional[dict] = None
    density_inequality: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.first_violation is None

    def to_dict(self) -> dict:
        return {
            "clause": self.clause,
            "N": self.N,
            "s": str(self.s),
            "t": str(self.t),
            "checked": self.checked,
            "first_violation": self.first_violation,
            "density_inequality": self.density_inequality,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _sides(clause: str, N: int, base_s, base_t, sub_s, sub_t, horizon: int) -> tuple:
    """Left and right sides of the clause for every admissible ``n``."""
    if clause in ("i", "iii"):
        n = np.arange(1, horizon // N + 1, dtype=np.int64)
        m, big = n, N * n
    else:
        n = np.arange(1, horizon + 1, dtype=np.int64)
        m, big = n // N, n
    if clause in ("i", "ii"):
        # N * xi_m(f^N, t) <= xi_big(f, s)
        return n, N * sub_t[m], base_s[big]
    # N * (delta_m(f^N, s) - 1) <= delta_big(f, t)
    return n, N * (m - sub_s[m] - 1), big - base_t[big]


def lemma1_verify(series: DistanceSeries, N: int, s, t, clause: str, horizon: Optional[int] = None) -> Lemma1Report:
    """Check one counting inequality for every admissible ``n`` against ``series`` (the ``f``-series)."""
    if clause not in CLAUSES:
        raise ValueError(f"clause must be one of {CLAUSES}")
    if N < 1:
        raise ValueError("N must be >= 1")
    s, t = as_rational(s), as_rational(t)
    horizon = len(series) if horizon is None else horizon
    if horizon < 10 * N:
        raise ValueError(f"horizon {horizon} too small for N={N} (need >= {10 * N})")
    if horizon > len(series):
        raise ValueError("horizon exceeds the series length")
    base = series.head(horizon)
    sub = base.subsample(N)
    base_s, base_t = prefix_counts(base, s), prefix_counts(base, t)
    sub_s, sub_t = prefix_counts(sub, s), prefix_counts(sub, t)
    n, lhs, rhs = _sides(clause, N, base_s, base_t, sub_s, sub_t, horizon)
    bad = np.nonzero(lhs > rhs)[0]
    first = None
    if len(bad):
        j = int(bad[0])
        first = {"n": int(n[j]), "lhs": int(lhs[j]), "rhs": int(rhs[j])}
    return Lemma1Report(clause, N, s, t, len(n), first, _density_side(clause, base, sub, s, t))


def _density_side(clause: str, base, sub, s, t) -> dict:
    """The distribution-function inequality read off the tail estimates."""
    phi = estimate_df(base, sorted({s, t}))
    psi = estimate_df(sub, sorted({s, t}))
    if clause == "i":
        left, right, text = psi.upper_at(t), phi.upper_at(s), "Psi*(t) <= Phi*(s)"
    elif clause == "ii":
        left, right, text = psi.lower_at(t), phi.lower_at(s), "Psi(t) <= Phi(s)"
    elif clause == "iii":
        left, right, text = phi.lower_at(t), psi.lower_at(s), "Phi(t) <= Psi(s)"
    else:
        left, right, text = phi.upper_at(t), psi.upper_at(s), "Phi*(t) <= Psi*(s)"
    return {"statement": text, "left": str(left), "right": str(right), "holds": left <= right}


# ------------------------------------------------- DC2½ under iteration


@dataclass
class Theorem2Report:
    N: int
    base: ChaosVerdict
    iterate: ChaosVerdict
    horizon: int

    @property
    def agree(self) -> bool:
        return self.base.dc2half == self.iterate.dc2half

    @property
    def phi0_gaps(self) -> tuple:
        return tuple(v.phi0[1] - v.phi0[0] for v in (self.base, self.iterate))

    def to_dict(self) -> dict:
        return {"N": self.N, "horizon": self.horizon, "agree": self.agree,
                "base": self.base.to_dict(), "iterate": self.iterate.to_dict()}


def theorem2_check(series: DistanceSeries, N: int, tau=DEFAULT_TAU, diam=1, grid=None) -> Theorem2Report:
    """Classify ``series`` under ``f`` and its ``N``-subsample under ``f^N``.

    Both cover the same base time range, so the iterate sees ``horizon / N``
    samples.
    """
    if not 2 <= N <= 8:
        raise ValueError("N must lie in [2, 8]")
    grid = grid or default_grid(diam)
    base = classify(estimate_df(series, grid), tau)
    iterate = classify(estimate_df(series.subsample(N), grid), tau)
    return Theorem2Report(N, base, iterate, len(series))


# --------------------------------------------------- DC3 under H and H^2


def sample_points() -> dict:
    return {"x": moving(1), "y": moving(3), "z": moving(-2)}


@dataclass
class HIterationReport:
    under_h: dict
    under_h2: dict
    psi: dict
    horizon: int

    @property
    def ok(self) -> bool:
        return not any(v.dc3 for v in self.under_h.values()) and any(v.dc3 for v in self.under_h2.values())


def h_iteration_experiment(m_max: int = 6, tau=DEFAULT_TAU, preset: str = "dominant") -> HIterationReport:
    """DC3 under ``H``, DC3 under ``H^2`` for the shifted pairs ``(H^j x, H^j y)``."""
    schedule = EpochSchedule(preset)
    H = OscillatorSystem("H", schedule)
    horizon = schedule.horizon(m_max)
    pts = sample_points()
    grid = default_grid(H.diam)
    series = {}
    for a, b in (("x", "y"), ("x", "z"), ("y", "z")):
        series[a + b] = H.pair_series(pts[a], pts[b], horizon)
    ests = {k: estimate_df(v, grid) for k, v in series.items()}
    under_h = {k: classify(e, tau) for k, e in ests.items()}
    under_h2 = {}
    for j in (0, 1):
        est = estimate_df(series["xy"].subsample(2, j), grid)
        under_h2[f"H^{j}(x),H^{j}(y)"] = classify(est, tau)
    return HIterationReport(under_h, under_h2, ests, horizon)

