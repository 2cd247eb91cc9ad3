import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import ladder_points
from dcchaos.iteration import (CLAUSES, default_modulus, sample_points, lemma1_verify, power_system,
                               subsample_series, theorem2_check)
from dcchaos.numerics import RationalSeries, fixed, literal_distance_series, moving, orbit
from dcchaos.oscillators import EpochSchedule, OscillatorSystem
from dcchaos.shifts import ShiftSystem, make_dc_pair

O1 = OscillatorSystem("O1")
G = OscillatorSystem("G")
H = OscillatorSystem("H")


def test_subsample_examples():
    s = RationalSeries.from_fractions(range(10))
    assert subsample_series(s, 2).values == [0, 2, 4, 6, 8]
    assert subsample_series(s, 1).values == s.values
    with pytest.raises(ValueError):
        subsample_series(s, 0)


def test_g_series_subsample_keeps_synchronic_twos():
    sched = EpochSchedule()
    base = G.pair_series(moving(1), moving(3), sched.s(3) + 1)
    sub = subsample_series(base, 2)
    # body of epoch 2 starts at s_2 + 5 = 7, i.e. subsample index 4
    assert set(sub.values[4:sched.s(3) // 2 + 1]) == {2}


@pytest.mark.parametrize("system, p, N", [(O1, moving(1), 3), (G, moving(3), 2), (H, moving(-2), 5)])
def test_power_orbit_is_every_nth_point(system, p, N):
    n = 400
    assert orbit(power_system(system, N), p, n) == orbit(system, p, N * (n - 1) + 1)[::N]


def test_power_of_one_is_the_system():
    assert orbit(power_system(O1, 1), moving(1), 200) == orbit(O1, moving(1), 200)
    with pytest.raises(ValueError):
        power_system(O1, 0)


def test_h_squared_orbit_of_y_equals_g_squared():
    n = 10**5
    a = power_system(H, 2).pair_series(moving(3), moving(3, 1), n)
    hy = orbit(power_system(H, 2), moving(3), 3000)
    gy = orbit(power_system(G, 2), moving(3), 3000)
    assert hy == gy
    assert len(a) == n


@given(ladder_points(((0, 1), (2, 3))), ladder_points(((0, 1), (2, 3))), st.integers(2, 4))
def test_iterate_pair_series_matches_literal(p, q, N):
    fast = power_system(G, N).pair_series(p, q, 150)
    slow = literal_distance_series(power_system(G, N), p, q, 150)
    assert fast.values == slow.values


def test_default_modulus():
    assert default_modulus(O1, F(1, 4), 3) == F(1, 4)
    assert default_modulus(ShiftSystem(), F(1, 2), 3) == F(1, 8)
    assert default_modulus(power_system(ShiftSystem(), 2), 1, 2) == F(1, 2)


def brute_clause_i(system, p, q, N, s, t, n_max):
    """Oracle: count from two literal orbits, one of f and one of f^N."""
    base = literal_distance_series(system, p, q, N * n_max).values
    it = literal_distance_series(power_system(system, N), p, q, n_max).values
    for n in range(1, n_max + 1):
        lhs = N * sum(1 for d in it[:n] if d < t)
        rhs = sum(1 for d in base[:N * n] if d < s)
        if lhs > rhs:
            return n, lhs, rhs
    return None


def test_o1_clause_i_example_is_violated_at_187():
    # moving x against the fixed 1/2: the iterate's samples can sit nearer to z
    # than the base orbit does on average, so t = s is not a valid modulus here
    p, q = moving(1), fixed(F(1, 2))
    want = brute_clause_i(O1, p, q, 2, F(1, 4), F(1, 4), 200)
    assert want == (187, 232, 231)
    rep = lemma1_verify(O1.pair_series(p, q, 400), 2, F(1, 4), F(1, 4), "i")
    assert rep.first_violation == {"n": 187, "lhs": 232, "rhs": 231}


@pytest.mark.parametrize("clause", CLAUSES)
@pytest.mark.parametrize("N", [2, 3, 5])
def test_constant_series_sits_on_the_boundary(clause, N):
    zero = RationalSeries.from_fractions([0] * 500)
    assert lemma1_verify(zero, N, F(1, 2), F(1, 2), clause).ok
    far = RationalSeries.from_fractions([1] * 500)
    assert lemma1_verify(far, N, F(1, 2), F(1, 2), clause).ok


def test_dc1_shift_clause_iii():
    pair = make_dc_pair("DC1")
    system = ShiftSystem()
    s = F(1, 2)
    series = system.pair_series(pair.u, pair.v, 3 * 10**4)
    rep = lemma1_verify(series, 3, s, default_modulus(system, s, 3), "iii")
    assert rep.t == F(1, 8) and rep.ok and rep.checked == 10**4


@pytest.mark.parametrize("clause", CLAUSES)
def test_shift_pairs_satisfy_all_clauses(clause):
    system = ShiftSystem()
    for kind in ("DC1", "DC2.5-strict"):
        pair = make_dc_pair(kind)
        series = system.pair_series(pair.u, pair.v, 20000)
        for N in (2, 3, 5):
            for s in (F(1, 8), F(1, 2), F(1)):
                assert lemma1_verify(series, N, s, default_modulus(system, s, N), clause).ok


def brute_clause(base, it, clause, N, s, t, horizon):
    """Oracle: every clause straight from its counting definition."""
    xi = lambda vals, r, n: sum(1 for d in vals[:n] if d < r)  # noqa: E731
    dl = lambda vals, r, n: n - xi(vals, r, n)  # noqa: E731
    ns = range(1, horizon // N + 1) if clause in ("i", "iii") else range(1, horizon + 1)
    for n in ns:
        m, big = (n, N * n) if clause in ("i", "iii") else (n // N, n)
        if clause in ("i", "ii"):
            lhs, rhs = N * xi(it, t, m), xi(base, s, big)
        else:
            lhs, rhs = N * (dl(it, s, m) - 1), dl(base, t, big)
        if lhs > rhs:
            return {"n": n, "lhs": lhs, "rhs": rhs}
    return None


@pytest.mark.parametrize("clause", CLAUSES)
@pytest.mark.parametrize("N", [2, 3])
@pytest.mark.parametrize("s", [F(1, 2), F(2)])
def test_g_pair_clauses_match_literal_counting(clause, N, s):
    # the G pair breaks some clauses with t = s; both routes must agree on where
    h = 600
    p, q = moving(1), moving(3)
    base = literal_distance_series(G, p, q, h).values
    it = literal_distance_series(power_system(G, N), p, q, (h - 1) // N + 1).values
    rep = lemma1_verify(G.pair_series(p, q, h), N, s, s, clause)
    assert rep.first_violation == brute_clause(base, it, clause, N, s, s, h)


def test_g_pair_clause_iv_violation_is_real():
    rep = lemma1_verify(G.pair_series(moving(1), moving(3), 20000), 2, F(2), F(2), "iv")
    assert rep.first_violation is not None and rep.first_violation["n"] == 36


def test_lemma1_errors_and_report():
    series = RationalSeries.from_fractions([0] * 30)
    with pytest.raises(ValueError):
        lemma1_verify(series, 5, 1, 1, "i")
    with pytest.raises(ValueError):
        lemma1_verify(series, 2, 1, 1, "v")
    with pytest.raises(ValueError):
        lemma1_verify(series, 2, 1, 1, "i", horizon=31)
    d = json.loads(lemma1_verify(series, 2, 1, 1, "ii").to_json())
    assert set(d) == {"clause", "N", "s", "t", "checked", "first_violation", "density_inequality"}
    assert d["density_inequality"]["holds"] is True


@pytest.mark.slow
def test_strict_and_dc1_pairs_keep_class_under_iteration():
    system = ShiftSystem()
    strict = make_dc_pair("DC2.5-strict")
    rep = theorem2_check(system.pair_series(strict.u, strict.v, 10**6), 3)
    assert rep.agree and rep.base.dc2half and rep.iterate.dc2half
    dc1 = make_dc_pair("DC1")
    rep = theorem2_check(system.pair_series(dc1.u, dc1.v, 10**6), 2)
    assert rep.base.dc1 and rep.iterate.dc1


def test_g_pair_not_dc2half_under_iteration():
    pts = sample_points()
    rep = theorem2_check(G.pair_series(pts["x"], pts["y"], 10**5), 2, diam=3)
    assert rep.agree and not rep.base.dc2half
    assert rep.base.phi0 == rep.iterate.phi0 == (0, 0)


def test_iteration_check_rejects_bad_n():
    with pytest.raises(ValueError):
        theorem2_check(RationalSeries.from_fractions([0] * 100), 9)


def test_sample_points():
    assert sample_points() == {"x": moving(1), "y": moving(3), "z": moving(-2)}
