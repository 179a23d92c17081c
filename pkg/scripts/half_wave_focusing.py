"""Half-wave propagation of a focusing annulus: L^p blows up, the parabolic norm does not.

    python3 scripts/half_wave_focusing.py --N 128 --R 24
"""
import argparse

import numpy as np

from fiohardy.config import RunConfig
from fiohardy.grid import lp_norm
from fiohardy.norms import parabolic_norms
from fiohardy.packets import PacketFamily
from fiohardy.suite import make_function
from fiohardy.transforms import half_wave


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=128)
    ap.add_argument("--R", type=float, default=24.0, help="annulus radius in frequency")
    ap.add_argument("--p", type=float, default=4.0)
    args = ap.parse_args()

    fam = PacketFamily(*RunConfig(N=args.N).build())
    g = fam.grid
    f = make_function(g, "focused_annulus", g.resolved_band[1], R=args.R, halfwidth=3.0)
    base_lp = lp_norm(f, args.p, g)
    base = parabolic_norms(fam, f, (2.0, args.p))
    print(f"t       L^{args.p:g} ratio   parabolic p={args.p:g}   parabolic p=2")
    # the annulus carries phase exp(-i|zeta|), so it focuses at the origin at t = 1
    for t in np.linspace(0, 2, 9):
        ft = half_wave(f, float(t))
        n = parabolic_norms(fam, ft, (2.0, args.p))
        print(f"{t:<6.2f}  {lp_norm(ft, args.p, g) / base_lp:<12.4f}  {n[args.p] / base[args.p]:<18.6f}"
              f"  {n[2.0] / base[2.0]:.12f}")


if __name__ == "__main__":
    main()
