"""Write orbit traces of x, y, z for O1, G and H as CSV files."""

import argparse
from pathlib import Path

from dcchaos.export import export_trace
from dcchaos.iteration import sample_points
from dcchaos.oscillators import EpochSchedule, OscillatorSystem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("out/traces"))
    ap.add_argument("--epochs", type=int, default=3, help="trace up to s_{epochs+1}")
    ap.add_argument("--preset", default="dominant")
    args = ap.parse_args()

    sched = EpochSchedule(args.preset)
    horizon = sched.s(args.epochs + 1)
    pts = sample_points()
    for sid in ("O1", "G", "H"):
        system = OscillatorSystem(sid, sched)
        chosen = {k: p for k, p in pts.items() if system.contains(p)}
        print(export_trace(system, chosen, horizon, args.out / f"trace_{sid}.csv"))


if __name__ == "__main__":
    main()
