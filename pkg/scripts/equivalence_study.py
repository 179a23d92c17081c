"""Norm-equivalence table: every suite member, every norm, p in {4/3, 2, 4}.

    python3 scripts/equivalence_study.py --N 64 --out equivalence.csv
"""
import argparse
import csv
import logging

from fiohardy.config import RunConfig
from fiohardy.norms import measure
from fiohardy.packets import PacketFamily
from fiohardy.suite import generate_suite

NAMES = ("hardy_tent", "hardy_via_V", "square_function", "parabolic", "maximal", "vertical")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=64)
    ap.add_argument("--out", default="equivalence.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    cfg = RunConfig(N=args.N)
    fam = PacketFamily(*cfg.build())
    rows = []
    for tf in generate_suite(fam.grid, "default", fam.grid.resolved_band[1]):
        m = measure(fam, tf.field, tf.id)
        for p in cfg.ps:
            n = m.norms(p)
            rows.append({"test_id": tf.id, "p": p, "lp": n["lp"], **{k: n[k] for k in NAMES},
                         "parabolic/hardy_tent": n["parabolic"] / n["hardy_tent"]})
            print(f"{tf.id:14s} p={p:.3g}  " + "  ".join(f"{k}={n[k] / n['lp']:.3f}" for k in NAMES))
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for p in cfg.ps:
        r = [row["parabolic/hardy_tent"] for row in rows if row["p"] == p]
        print(f"p={p:.3g}: parabolic/hardy_tent in [{min(r):.3f}, {max(r):.3f}], C* = {max(max(r), 1 / min(r)):.2f}")


if __name__ == "__main__":
    main()
