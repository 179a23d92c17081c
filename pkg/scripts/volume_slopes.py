"""Ball and slab volumes on the cosphere bundle, quadrature against Monte Carlo.

    python3 scripts/volume_slopes.py --samples 400000
"""
import argparse

import numpy as np

from fiohardy.geometry import ball_volume, ball_volume_mc, fit_slope, slab_volume, slab_volume_exact


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--sigma", type=float, default=2.0**-12, help="slab scale parameter")
    args = ap.parse_args()

    taus = np.geomspace(1e-2, 1e2, 25)
    quad = np.array([ball_volume(float(t)) for t in taus])
    print("tau         quadrature    monte_carlo   z")
    for t, q in zip(taus, quad):
        mc, se = ball_volume_mc(float(t), samples=args.samples, seed=1)
        print(f"{t:<10.4g}  {q:<12.5e}  {mc:<12.5e}  {(mc - q) / se:+.2f}")
    for lo, hi, target in ((1e-2, 1e-1, 4), (1e1, 1e2, 2)):
        sel = (taus >= lo * 0.999) & (taus <= hi * 1.001)
        print(f"ball slope on [{lo:g}, {hi:g}]: {fit_slope(taus[sel], quad[sel]):.3f} (expected {target})")

    js = np.arange(1, 23)
    sc = 2.0**js * args.sigma
    exact = np.array([slab_volume_exact(int(j), args.sigma) for j in js])
    print("\nj   2^j sigma    exact         monte_carlo")
    for j, s, e in zip(js, sc, exact):
        mc, _ = slab_volume(int(j), args.sigma, samples=args.samples, seed=int(j))
        print(f"{j:<3d} {s:<11.4g}  {e:<12.5e}  {mc:<12.5e}")
    below, above = sc < 0.5, sc > 2
    print(f"slab slope below scale 1: {fit_slope(sc[below], exact[below]):.3f} (expected 1.5)")
    print(f"slab slope above scale 1: {fit_slope(sc[above], exact[above]):.3f} (expected 1)")


if __name__ == "__main__":
    main()
