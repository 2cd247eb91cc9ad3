from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dcchaos.distribution import prefix_counts
from dcchaos.numerics import DyadicSeries
from dcchaos.shifts import (BlockSpec, DegeneratePairError, ShiftPair, ShiftPoint, ShiftSystem, block_sequence,
                            coded_shift_set, make_dc_pair, shift_distance, zero_density_profile, zeros_point)


def bits(a):
    return "".join(map(str, a.tolist()))


@pytest.mark.parametrize("spec, n, want", [
    (BlockSpec("constant", {"length": 1}, 0), 6, "010101"),
    # runs 2 then 4: the second run fills positions 2..5
    (BlockSpec("power", {"base": 2}, 0), 6, "001111"),
    (BlockSpec("power", {"base": 4}, 1), 5, "11110"),
])
def test_block_sequence_examples(spec, n, want):
    assert bits(block_sequence(spec, n)) == want


def test_block_sequence_rejects_empty_prefix():
    with pytest.raises(ValueError):
        block_sequence(BlockSpec("zeros"), 0)


def test_block_spec_validation_and_roundtrip():
    with pytest.raises(ValueError):
        BlockSpec("fibonacci")
    with pytest.raises(ValueError):
        BlockSpec("zeros", start_symbol=2)
    spec = make_dc_pair("DC1").u.spec
    assert BlockSpec.from_dict(spec.to_dict()) == spec


def test_double_power_runs():
    assert bits(block_sequence(BlockSpec("double_power"), 24)) == "0000" + "1" * 16 + "0000"


@pytest.mark.parametrize("u, i, want", [
    (ShiftPoint(BlockSpec("prefix", {"symbols": "1000"})), 0, F(1)),
    (ShiftPoint(BlockSpec("prefix", {"symbols": "0010"})), 0, F(1, 4)),
    (ShiftPoint(BlockSpec("prefix", {"symbols": "0010"})), 3, F(0)),
    (zeros_point(), 17, F(0)),
])
def test_shift_distance_examples(u, i, want):
    assert shift_distance(u, zeros_point(), i) == want


def test_shift_distance_rejects_negative_index():
    with pytest.raises(ValueError):
        shift_distance(zeros_point(), zeros_point(), -1)


def test_zero_density_examples():
    alt = ShiftPoint(BlockSpec("constant", {"length": 1}, 0))
    assert list(zero_density_profile(alt, 4)) == [F(1), F(1, 2), F(2, 3), F(1, 2)]
    assert set(zero_density_profile(zeros_point(), 50)) == {F(1)}
    four = ShiftPoint(BlockSpec("power", {"base": 4}, 0))
    assert zero_density_profile(four, 20)[-1] == F(1, 5)


def test_zero_density_rejects_empty_horizon():
    with pytest.raises(ValueError):
        zero_density_profile(zeros_point(), 0)


def brute_tail_extremes(u, horizon, window):
    """Oracle: fold over the symbols one at a time in plain Python."""
    zeros, lo, hi = 0, None, None
    for n, sym in enumerate(u.symbols(horizon).tolist(), start=1):
        zeros += sym == 0
        if n >= window:
            d = F(zeros, n)
            lo = d if lo is None else min(lo, d)
            hi = d if hi is None else max(hi, d)
    return lo, hi


@pytest.mark.parametrize("kind", ["DC1", "DC2.5-strict"])
def test_tail_extremes_match_brute_oracle(kind):
    u = make_dc_pair(kind).u
    assert zero_density_profile(u, 20000).tail_extremes(1000) == brute_tail_extremes(u, 20000, 1000)


@pytest.mark.slow
def test_dc_pairs_hit_their_density_targets():
    lo, hi = zero_density_profile(make_dc_pair("DC1").u, 10**6).tail_extremes(10**4)
    assert lo <= F(1, 20) and hi >= F(19, 20)
    lo, hi = zero_density_profile(make_dc_pair("DC2.5-strict").u, 10**6).tail_extremes(10**4)
    assert abs(lo - F(1, 4)) <= F(1, 20) and abs(hi - F(3, 4)) <= F(1, 20)


def test_dc_pair_expected_values():
    assert make_dc_pair("DC1").expected == (0, 1)
    assert make_dc_pair("DC2.5-strict").expected == (F(1, 4), F(3, 4))
    with pytest.raises(ValueError):
        make_dc_pair("DC3")


def test_degenerate_pair_rejected():
    u = make_dc_pair("DC1").u
    with pytest.raises(DegeneratePairError):
        ShiftPair(u, ShiftPoint(u.spec))


def test_density_target_parameters_checked():
    with pytest.raises(ValueError):
        block_sequence(BlockSpec("density_targets", {"low": "3/4", "high": "1/4"}), 10)


@pytest.mark.parametrize("kind", ["DC1", "DC2.5-strict"])
@pytest.mark.parametrize("delta", [F(3, 4), F(1), F(5, 8)])
def test_hits_above_half_are_zero_symbols(kind, delta):
    u = make_dc_pair(kind).u
    series = ShiftSystem().pair_series(u, zeros_point(), 10**5)
    zeros = np.concatenate([[0], np.cumsum(u.symbols(10**5) == 0)])
    assert np.array_equal(prefix_counts(series, delta), zeros)


@pytest.mark.parametrize("kind", ["DC1", "DC2.5-strict"])
@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_dyadic_hits_track_zero_density(kind, r):
    u = make_dc_pair(kind).u
    h = 20000
    series = ShiftSystem().pair_series(u, zeros_point(), h)
    hits = prefix_counts(series, F(1, 2**r))
    sym = u.symbols(h + r)
    zeros = np.concatenate([[0], np.cumsum(sym[:h] == 0)])
    # a zero misses only when a one-run starts within the next r symbols
    starts = np.concatenate([[0], np.cumsum((sym[1:] == 1) & (sym[:-1] == 0))])
    for n in range(1, h + 1):
        runs = int(starts[min(n + r - 1, h + r - 1)])
        assert 0 <= zeros[n] - hits[n] <= r * runs


def test_pair_series_matches_pointwise_distance():
    u = make_dc_pair("DC2.5-strict").u
    series = ShiftSystem().pair_series(u, zeros_point(), 300)
    assert isinstance(series, DyadicSeries)
    assert series.values == [shift_distance(u, zeros_point(), i) for i in range(300)]


@given(st.integers(0, 2000), st.integers(0, 7), st.integers(0, 7))
def test_shift_commutes_with_distance(i, a, b):
    pts = coded_shift_set()
    p, q = pts[a], pts[b]
    assert shift_distance(p.shifted(i), q.shifted(i), 0) == shift_distance(p, q, i)


def test_coded_set_points_are_distinct():
    pts = coded_shift_set()
    prefixes = {bits(p.symbols(3**6)) for p in pts}
    assert len(prefixes) == 8


def test_prefix_is_replayable():
    spec = make_dc_pair("DC1").u.spec
    fresh = block_sequence(BlockSpec.from_dict(spec.to_dict()), 5000)
    assert np.array_equal(ShiftPoint(spec).symbols(5000), fresh)
