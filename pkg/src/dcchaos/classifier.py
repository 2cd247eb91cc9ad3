"""Grid-relative DC1 / DC2 / DC2½ / DC3 verdicts from a :class:`DFEstimate`.

Verdicts are "detected at tolerance": a false flag is never a proof that no
such behaviour exists beyond the horizon.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .distribution import DFEstimate, df_at_zero
from .numerics import as_rational

DEFAULT_TAU = Fraction(1, 20)


def check_tau(tau) -> Fraction:
    tau = as_rational(tau)
    if not 0 < tau < Fraction(1, 4):
        raise ValueError(f"tolerance must lie in (0, 1/4), got {tau}")
    return tau


@dataclass(frozen=True)
class ChaosVerdict:
    dc1: bool
    dc2: bool
    dc2half: bool
    dc3: bool
    tolerance: Fraction
    phi0: tuple
    witness_epsilon: Optional[Fraction] = None
    witness_c: Optional[Fraction] = None
    witness_q: Optional[Fraction] = None
    witness_interval: Optional[tuple] = None
    grid: tuple = ()

    @property
    def flags(self) -> tuple:
        return self.dc1, self.dc2, self.dc2half, self.dc3

    def to_dict(self) -> dict:
        s = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "dc1": self.dc1,
            "dc2": self.dc2,
            "dc2half": self.dc2half,
            "dc3": self.dc3,
            "tolerance": str(self.tolerance),
            "phi0": [str(v) for v in self.phi0],
            "witness_epsilon": s(self.witness_epsilon),
            "witness_c": s(self.witness_c),
            "witness_q": s(self.witness_q),
            "witness_interval": None if self.witness_interval is None else [str(v) for v in self.witness_interval],
            "grid": [str(d) for d in self.grid],
            "note": "detected at tolerance on the listed grid",
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def implication_check(v) -> bool:
    """True iff dc1 => dc2 => dc2half => dc3 holds for the flags of ``v``."""
    flags = v.flags if isinstance(v, ChaosVerdict) else tuple(v)
    return all(not a or b for a, b in zip(flags, flags[1:]))


def _widest_run(mask: list) -> Optional[tuple]:
    best, start = None, None
    for i, ok in enumerate(mask + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def classify(est: DFEstimate, tau=DEFAULT_TAU) -> ChaosVerdict:
    tau = check_tau(tau)
    grid, lower, upper = est.delta_grid, est.lower, est.upper
    lo0, up0, _ = df_at_zero(est)

    upper_full = all(u >= 1 - tau for u in upper)
    eps = next((d for d, lo in zip(grid, lower) if lo <= tau), None)
    dc1 = upper_full and eps is not None
    dc2 = upper_full and lo0 <= 1 - 3 * tau

    dc2half = lo0 + 2 * tau < up0
    c = q = None
    if dc2half:
        c = (lo0 + up0) / 2
        for d, lo, up in zip(grid, lower, upper):
            if lo + tau < c < up - tau:
                q = d
            else:
                break

    run = _widest_run([lo + 2 * tau < up for lo, up in zip(lower, upper)])
    dc3 = run is not None
    interval = None
    if dc3:
        interval = (grid[run[0]], grid[run[1] - 1])

    # close under dc1 => dc2 => dc2half => dc3, carrying witnesses along
    dc2 = dc2 or dc1
    if dc2 and not dc2half:
        dc2half = True
        c = (lo0 + up0) / 2 if lo0 < up0 else (1 + lo0) / 2
        q = q if q is not None else grid[0]
    if dc2half and not dc3:
        dc3 = True
        interval = (Fraction(0), q)
    if dc1 and eps is None:
        eps = grid[0]
    return ChaosVerdict(dc1, dc2, dc2half, dc3, tau, (lo0, up0), eps if dc1 else None,
                        c, q, interval, tuple(grid))
