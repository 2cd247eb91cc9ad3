from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dcchaos.numerics import LadderPoint

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def grid_coords(lo, hi, den=12):
    """Rationals in [lo, hi] on a 1/den grid."""
    return st.integers(0, (hi - lo) * den).map(lambda j: Fraction(lo) + Fraction(j, den))


def ladder_points(intervals=((0, 1),), allow_fixed=True, max_level=400):
    coord = st.one_of(*[grid_coords(lo, hi) for lo, hi in intervals])
    level = st.integers(1, max_level)
    if allow_fixed:
        level = st.one_of(st.none(), level)
    return st.builds(LadderPoint, coord, level)
