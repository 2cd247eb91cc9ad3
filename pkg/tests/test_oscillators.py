from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import grid_coords, ladder_points
from dcchaos.numerics import fixed, literal_distance_series, moving, orbit, series_equal
from dcchaos.oscillators import (EpochSchedule, MapFamily, OscillatorSystem, epoch_bounds, mirror,
                                 piecewise_map, schedule_map)

DOM = EpochSchedule("dominant")
LIT = EpochSchedule("paper-literal")


def brute_schedule(n_of, m_max):
    """Oracle: s_1 = 0, s_{m+1} = s_m + 2 m n_m, recomputed from scratch."""
    s = [None, 0]
    for m in range(1, m_max + 1):
        s.append(s[m] + 2 * m * n_of(m, s[m]))
    return s


def test_schedule_matches_recurrence_oracle():
    dom = brute_schedule(lambda m, s: max(m, m * s), 7)
    lit = brute_schedule(lambda m, s: m, 12)
    assert [DOM.s(m) for m in range(1, 9)] == dom[1:]
    assert [LIT.s(m) for m in range(1, 14)] == lit[1:]
    assert dom[1:5] == [0, 2, 18, 342]
    assert [DOM.n(m) for m in (1, 2, 3)] == [1, 4, 54]
    assert lit[2:5] == [2, 10, 28]


def test_schedule_n_nondecreasing():
    for sched in (DOM, LIT):
        ns = [sched.n(m) for m in range(1, 9)]
        assert ns == sorted(ns)


def test_unknown_preset_rejected():
    with pytest.raises(ValueError):
        EpochSchedule("fast")


@pytest.mark.parametrize("family, m, x, want", [
    (MapFamily.G, 2, F(3, 4), F(1, 4)),
    (MapFamily.G_HAT, 2, F(9, 10), F(1)),
    (MapFamily.L, 3, F(-2) + F(1, 6), F(-2)),
    (MapFamily.H, 4, F(3), F(11, 4)),
    (MapFamily.ID, 7, F(5, 2), F(5, 2)),
])
def test_piecewise_map_examples(family, m, x, want):
    assert piecewise_map(family, m, x) == want


def test_piecewise_map_domain():
    with pytest.raises(ValueError):
        piecewise_map(MapFamily.H, 2, F(1, 2))
    with pytest.raises(ValueError):
        piecewise_map(MapFamily.ID, 2, F(3, 2))


@given(st.sampled_from([f for f in MapFamily if f is not MapFamily.ID]), st.integers(1, 40), st.data())
def test_piecewise_maps_are_nonexpansive(family, m, data):
    lo = {"g": 0, "g^": 0, "h": 2, "h^": 2, "l": -2, "l^": -2}[family.value]
    a = data.draw(grid_coords(lo, lo + 1, 60))
    b = data.draw(grid_coords(lo, lo + 1, 60))
    assert abs(piecewise_map(family, m, a) - piecewise_map(family, m, b)) <= abs(a - b)


def test_conjugation_identity_exact():
    for m in range(1, 51):
        for j in range(4 * m + 1):
            x = 2 + F(j, 4 * m)
            assert 1 - piecewise_map(MapFamily.H_HAT, m, x) == piecewise_map(MapFamily.L, m, 1 - x)
            assert 1 - piecewise_map(MapFamily.H, m, x) == piecewise_map(MapFamily.L_HAT, m, 1 - x)


@pytest.mark.parametrize("sched, k, want", [
    (DOM, 5, (2, 0, 3)),
    (LIT, 11, (3, 0, 1)),
    (DOM, 1, (1, 0, 1)),
    (LIT, 1, (1, 0, 1)),
])
def test_epoch_bounds_examples(sched, k, want):
    assert epoch_bounds(sched, k) == want


@given(st.integers(1, 20000), st.sampled_from([DOM, LIT]))
def test_epoch_bounds_decomposition(k, sched):
    m, i, r = epoch_bounds(sched, k)
    assert sched.s(m) < k <= sched.s(m + 1)
    assert 0 <= i < sched.n(m) and 1 <= r <= 2 * m
    assert k == sched.s(m) + 2 * m * i + r


@pytest.mark.parametrize("track, k, want", [
    ("f", 5, (MapFamily.G_HAT, 2)),
    ("fhat", 3, (MapFamily.ID, 2)),
    ("fhat", 1, (MapFamily.ID, 1)),
    # k = 4 is r = 2 = m, still the identity half; the l half starts at k = 5
    ("ftilde", 4, (MapFamily.ID, 2)),
    ("ftilde", 5, (MapFamily.L, 2)),
    ("fhat", 2, (MapFamily.H, 1)),
])
def test_schedule_map_examples(track, k, want):
    assert schedule_map(track, DOM, k) == want


@pytest.mark.parametrize("sched", [DOM, LIT])
def test_schedule_partition(sched):
    for m in range(1, 5):
        counts = Counter()
        for k in range(sched.s(m) + 1, sched.s(m + 1) + 1):
            for track in ("f", "fhat", "ftilde"):
                counts[track, schedule_map(track, sched, k)[0]] += 1
        for track in ("f", "fhat", "ftilde"):
            assert sum(v for (t, _), v in counts.items() if t == track) == sched.s(m + 1) - sched.s(m)
        assert counts["f", MapFamily.G] == counts["f", MapFamily.G_HAT] == m * sched.n(m)
        assert counts["fhat", MapFamily.ID] == m


def test_step_examples():
    G = OscillatorSystem("G")
    H = OscillatorSystem("H")
    assert G.step(moving(3, 1)) == moving(3, 2)
    # k = 2: m = 1, r = 2 > m, so h_1(3) = 2 and H reflects to 1 - 2
    assert H.step(moving(3, 2)) == moving(-1, 3)
    assert OscillatorSystem("O1").step(fixed(F(1, 2))) == fixed(F(1, 2))


def test_step_rejects_foreign_points():
    with pytest.raises(ValueError):
        OscillatorSystem("O2").step(moving(1))


@pytest.mark.parametrize("p, want", [
    (moving(3, 1), moving(-2, 1)),
    (fixed(F(1, 2)), fixed(F(1, 2))),
    (moving(2, 5), moving(-1, 5)),
])
def test_mirror_examples(p, want):
    assert mirror(p) == want


def test_diameters_follow_spaces():
    assert [OscillatorSystem(i).diam for i in ("O1", "O2", "G", "H")] == [1, 1, 3, 5]


def test_epoch_closure_o1():
    O1 = OscillatorSystem("O1")
    orb = orbit(O1, moving(1), DOM.s(5) + 1)
    assert all(orb[DOM.s(m)].coord == 1 for m in range(1, 6))


@pytest.mark.parametrize("system_id", ["O1", "G", "H"])
def test_coordinates_live_on_the_epoch_grid(system_id):
    system = OscillatorSystem(system_id)
    start = {"O1": moving(1), "G": moving(3), "H": moving(3)}[system_id]
    orb = orbit(system, start, DOM.s(4) + 1)
    for t in range(1, len(orb)):
        m = DOM.epoch_of(t)
        assert m % orb[t].coord.denominator == 0


def test_h_squared_equals_g_squared_on_y():
    H, G = OscillatorSystem("H"), OscillatorSystem("G")
    hy, gy = orbit(H, moving(3), 20001), orbit(G, moving(3), 20001)
    assert all(hy[2 * k] == gy[2 * k] for k in range(10001))


def test_mirror_orbit_under_h():
    H = OscillatorSystem("H")
    hy, hz = orbit(H, moving(3), 10000), orbit(H, moving(-2), 10000)
    assert all(b == mirror(a) for a, b in zip(hy, hz))
    # the two points swap between K and J every step
    assert all((2 <= a.coord <= 3) == (k % 2 == 0) for k, a in enumerate(hy[:400]))


SPACES = {"O1": ((0, 1),), "O2": ((2, 3),), "G": ((0, 1), (2, 3)), "H": ((0, 1), (2, 3), (-2, -1))}


@pytest.mark.parametrize("preset", ["dominant", "paper-literal"])
@pytest.mark.parametrize("system_id", ["O1", "O2", "G", "H"])
@given(data=st.data())
def test_fast_engine_matches_literal_stepping(system_id, preset, data):
    system = OscillatorSystem(system_id, EpochSchedule(preset))
    p = data.draw(ladder_points(SPACES[system_id], max_level=600))
    q = data.draw(ladder_points(SPACES[system_id], max_level=600))
    horizon = data.draw(st.integers(1, 700))
    assert series_equal(system.pair_series(p, q, horizon), literal_distance_series(system, p, q, horizon))


def test_fast_engine_small_chunks_agree():
    G = OscillatorSystem("G")
    a = G.pair_series(moving(1), moving(3), 5000)
    b = G.pair_series(moving(1), moving(3), 5000, chunk=97)
    assert series_equal(a, b)
