"""Tent norm as a function of the aperture lambda, with fitted growth exponents.

    python3 scripts/aperture_growth.py --N 64 --apertures 1 1.5 2 3 4
"""
import argparse

import numpy as np

from fiohardy.config import RunConfig
from fiohardy.geometry import fit_slope
from fiohardy.packets import PacketFamily
from fiohardy.suite import generate_suite
from fiohardy.tents import A_functional_streaming, tent_norm


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=64)
    ap.add_argument("--apertures", type=float, nargs="+", default=[1.0, 2.0, 4.0])
    ap.add_argument("--p", type=float, nargs="+", default=[4 / 3, 2.0, 4.0])
    args = ap.parse_args()

    fam = PacketFamily(*RunConfig(N=args.N).build())
    lams = sorted(args.apertures)
    print("test_id        p      " + "  ".join(f"lam={l:<5g}" for l in lams) + "  exponent")
    for tf in generate_suite(fam.grid, "default", fam.grid.resolved_band[1]):
        A = A_functional_streaming(fam, tf.field, "W", apertures=tuple(lams))
        for p in args.p:
            n = np.array([tent_norm(A[l], p, fam.grid) for l in lams])
            print(f"{tf.id:14s} {p:<6.3g} " + "  ".join(f"{v / n[0]:9.4f}" for v in n)
                  + f"  {fit_slope(lams, n):+.3f}")


if __name__ == "__main__":
    main()
