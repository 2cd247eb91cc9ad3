"""Classify the pairs among x, y, z under H and the shifted x, y pairs under H^2."""

import argparse
from fractions import Fraction

from dcchaos.distribution import analytic_df
from dcchaos.iteration import h_iteration_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=6)
    ap.add_argument("--tau", type=Fraction, default=Fraction(1, 20))
    ap.add_argument("--preset", default="dominant")
    args = ap.parse_args()

    rep = h_iteration_experiment(args.m_max, args.tau, args.preset)
    print(f"horizon {rep.horizon}")
    for name, v in rep.under_h.items():
        print(f"H   {name}: dc3={v.dc3} interval={v.witness_interval}")
    for name, v in rep.under_h2.items():
        print(f"H^2 {name}: dc3={v.dc3} interval={v.witness_interval}")

    print("\ndelta   psi_xy  est_xy(lo/up)    psi_yz  est_yz(lo/up)")
    for d in (Fraction(k, 2) for k in range(1, 11)):
        xy, yz = rep.psi["xy"], rep.psi["yz"]
        print(f"{float(d):5.2f}  {float(analytic_df('psi_xy', d)):6.3f}  "
              f"{float(xy.lower_at(d)):.3f}/{float(xy.upper_at(d)):.3f}    "
              f"{float(analytic_df('psi_yz', d)):6.3f}  {float(yz.lower_at(d)):.3f}/{float(yz.upper_at(d)):.3f}")


if __name__ == "__main__":
    main()
