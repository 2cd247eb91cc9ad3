"""Colouring a finite chaotic set by iterate index and extracting
monochromatic cliques."""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .classifier import DEFAULT_TAU, classify
from .distribution import default_grid, estimate_df
from .numerics import distance_series

MAX_EXACT_VERTICES = 16


class NoQualifyingColor(RuntimeError):
    """No shift ``j < N`` makes the pair chaotic under ``f^N`` at this tolerance."""

    def __init__(self, pair):
        super().__init__(f"no iterate index qualifies for pair {pair}")
        self.pair = pair


@dataclass(frozen=True)
class ColoredCompleteGraph:
    labels: tuple
    colors: dict  # (i, j) with i < j -> colour
    n_colors: int

    def __post_init__(self):
        n = len(self.labels)
        want = set(combinations(range(n), 2))
        if set(self.colors) != want:
            raise ValueError("every unordered vertex pair needs exactly one colour")
        if any(not 0 <= c < self.n_colors for c in self.colors.values()):
            raise ValueError(f"colours must lie in [0, {self.n_colors})")

    def __len__(self):
        return len(self.labels)

    def color(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("no loops in a complete graph")
        return self.colors[(i, j) if i < j else (j, i)]

    def is_monochromatic(self, subset: Sequence[int], color: Optional[int] = None) -> bool:
        seen = {self.color(a, b) for a, b in combinations(subset, 2)}
        return len(seen) <= 1 and (color is None or not seen or seen == {color})

    def to_dict(self) -> dict:
        return {"vertices": [str(v) for v in self.labels], "n_colors": self.n_colors,
                "edges": [[i, j, c] for (i, j), c in sorted(self.colors.items())]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ColoredCompleteGraph":
        return cls(tuple(d["vertices"]), {(int(i), int(j)): int(c) for i, j, c in d["edges"]}, int(d["n_colors"]))

    def to_dot(self) -> str:
        lines = ["graph colored {"]
        lines += [f'  v{i} [label="{v}"];' for i, v in enumerate(self.labels)]
        lines += [f'  v{i} -- v{j} [label="c{c}", colorscheme=set19, color={c % 9 + 1}];'
                  for (i, j), c in sorted(self.colors.items())]
        lines.append("}")
        return "\n".join(lines) + "\n"


def random_coloring(n: int, n_colors: int, rng: random.Random) -> ColoredCompleteGraph:
    colors = {e: rng.randrange(n_colors) for e in combinations(range(n), 2)}
    return ColoredCompleteGraph(tuple(range(n)), colors, n_colors)


# ------------------------------------------------------------- colouring


@dataclass
class ColoringReport:
    graph: ColoredCompleteGraph
    precondition_failures: list
    tested: dict  # (i, j) -> list of (j_shift, dc3)


def _dc3(series, grid, tau) -> bool:
    return classify(estimate_df(series, grid), tau).dc3


def color_by_iterate(points: Sequence, system, N: int, tau=DEFAULT_TAU, horizon: int = 10**5,
                     seed: Optional[int] = None, grid=None) -> ColoringReport:
    """Colour ``{a, b}`` by an index ``j < N`` with ``(f^j a, f^j b)`` DC3 under ``f^N``.

    The smallest such ``j`` is used; with ``seed`` a qualifying ``j`` is drawn
    at random instead.  ``horizon`` counts steps of ``f``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    grid = grid or default_grid(system.diam)
    rng = random.Random(seed) if seed is not None else None
    colors, failures, tested = {}, [], {}
    for i, k in combinations(range(len(points)), 2):
        series = distance_series(system, points[i], points[k], horizon)
        if not _dc3(series, grid, tau):
            failures.append((i, k))
        outcome = [(j, _dc3(series.subsample(N, j), grid, tau)) for j in range(N)]
        tested[(i, k)] = outcome
        good = [j for j, ok in outcome if ok]
        if not good:
            raise NoQualifyingColor((i, k))
        colors[(i, k)] = rng.choice(good) if rng else good[0]
    graph = ColoredCompleteGraph(tuple(repr(p) for p in points), colors, N)
    return ColoringReport(graph, failures, tested)


# ------------------------------------------------------------ extraction


@dataclass(frozen=True)
class MonoResult:
    subset: tuple
    color: Optional[int]
    pivots: int = 0


def pivot_monochromatic(g: ColoredCompleteGraph) -> MonoResult:
    """Pivot recursion: keep each pivot's largest one-colour neighbourhood,
    then take the pivots sharing the majority colour plus the last pivot."""
    if len(g) < 2:
        raise ValueError("need at least 2 vertices")
    remaining = list(range(len(g)))
    pivots = []  # (vertex, colour to every later pivot)
    while len(remaining) > 1:
        v, rest = remaining[0], remaining[1:]
        classes = {}
        for u in rest:
            classes.setdefault(g.color(v, u), []).append(u)
        c = max(sorted(classes), key=lambda col: len(classes[col]))
        pivots.append((v, c))
        remaining = classes[c]
    last = remaining[0]
    counts = Counter(c for _, c in pivots)
    color = max(sorted(counts), key=lambda col: counts[col])
    subset = tuple(sorted([v for v, c in pivots if c == color] + [last]))
    if not g.is_monochromatic(subset, color):
        raise AssertionError("pivot extraction produced a non-monochromatic set")
    return MonoResult(subset, color, len(pivots) + 1)


def _max_clique(adj: list, n: int) -> int:
    """Maximum clique as a bitmask, branch and bound on candidate sets."""
    best = 0

    def grow(clique: int, cand: int):
        nonlocal best
        if cand == 0:
            if bin(clique).count("1") > bin(best).count("1"):
                best = clique
            return
        if bin(clique).count("1") + bin(cand).count("1") <= bin(best).count("1"):
            return
        while cand:
            v = cand.bit_length() - 1
            grow(clique | (1 << v), cand & adj[v])
            cand &= ~(1 << v)
            if bin(clique).count("1") + bin(cand).count("1") <= bin(best).count("1"):
                return

    grow(0, (1 << n) - 1)
    return best


def max_monochromatic_clique(g: ColoredCompleteGraph) -> MonoResult:
    n = len(g)
    if n > MAX_EXACT_VERTICES:
        raise ValueError(f"exact search is capped at {MAX_EXACT_VERTICES} vertices, got {n}")
    if n < 2:
        return MonoResult(tuple(range(n)), None)
    best, best_color = 0, None
    for c in range(g.n_colors):
        adj = [sum(1 << u for u in range(n) if u != v and g.color(v, u) == c) for v in range(n)]
        mask = _max_clique(adj, n)
        if bin(mask).count("1") > bin(best).count("1"):
            best, best_color = mask, c
    subset = tuple(v for v in range(n) if best >> v & 1)
    return MonoResult(subset, best_color)


# ------------------------------------------------- extraction harness


@dataclass
class CorollaryReport:
    coloring: ColoringReport
    extracted: MonoResult
    image_dc3: dict  # (a, b) -> dc3 of the shifted pair under f^N, recomputed

    @property
    def ok(self) -> bool:
        return len(self.extracted.subset) >= 2 and all(self.image_dc3.values())


def corollary_harness(points: Sequence, system, N: int = 2, tau=DEFAULT_TAU, horizon: int = 3 ** 13,
                      grid=None) -> CorollaryReport:
    """Colour, extract a monochromatic set ``R`` of colour ``j`` and re-check
    every pair of ``f^j(R)`` under ``f^N`` from freshly stepped points."""
    from .iteration import power_system

    grid = grid or default_grid(system.diam)
    report = color_by_iterate(points, system, N, tau, horizon, grid=grid)
    mono = pivot_monochromatic(report.graph)
    j = mono.color
    iterate = power_system(system, N)
    n_iter = (horizon - j - 1) // N + 1
    image = {}
    for a, b in combinations(mono.subset, 2):
        p, q = points[a], points[b]
        for _ in range(j):
            p, q = system.step(p), system.step(q)
        image[(a, b)] = _dc3(iterate.pair_series(p, q, n_iter), grid, tau)
    return CorollaryReport(report, mono, image)
