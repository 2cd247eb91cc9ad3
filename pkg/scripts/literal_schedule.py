"""Even/odd checkpoint densities of the G pair under both epoch schedules.

With n_m = m the synchronic and diachronic blocks are too short to dominate
the running density, so the two checkpoint families stop separating.
"""

import argparse
from fractions import Fraction

from dcchaos.distribution import estimate_df
from dcchaos.numerics import distance_series, moving
from dcchaos.oscillators import EpochSchedule, OscillatorSystem


def checkpoint_table(preset, m_max, delta):
    sched = EpochSchedule(preset)
    G = OscillatorSystem("G", sched)
    horizon = sched.s(m_max + 1)
    series = distance_series(G, moving(1), moving(3), horizon)
    est = estimate_df(series, [delta], window_start=1, checkpoints=sched.checkpoints(horizon))
    return est.checkpoint_densities(delta)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=Fraction, default=Fraction(5, 2))
    ap.add_argument("--literal-m", type=int, default=12)
    ap.add_argument("--dominant-m", type=int, default=6)
    args = ap.parse_args()

    for preset, m in (("dominant", args.dominant_m), ("paper-literal", args.literal_m)):
        print(f"{preset} (delta = {args.delta})")
        for c in checkpoint_table(preset, m, args.delta):
            print(f"  m={c.epoch:2d} {c.parity:4s} t={c.time:>9d} density={float(c.density):.4f}")


if __name__ == "__main__":
    main()
