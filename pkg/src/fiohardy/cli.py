"""``fiohardy`` command-line entry point."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

__all__ = ["main", "build_parser"]

log = logging.getLogger("fiohardy")


def _pair(text: str, names: str) -> tuple[float, float]:
    from .config import eval_number

    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected {names}, got {text!r}")
    return eval_number(parts[0]), eval_number(parts[1])


def _grid(text: str):
    N, L = _pair(text, "N,L")
    return int(N), L


def _ladder(text: str):
    J, smin = _pair(text, "J,sigma_min")
    return int(J), smin


def _p(text: str) -> float:
    from .config import eval_number

    return eval_number(text)


def _family_from_args(args):
    from .geometry import DirectionSet, ScaleLadder
    from .grid import GridSpec
    from .packets import PacketFamily
    from .config import default_K, default_M

    N, L = args.grid
    J, smin = args.ladder if args.ladder else (3, None)
    ladder = ScaleLadder.from_sigma_min(J, smin) if smin else ScaleLadder(J, default_K(N, J, L))
    M = args.directions or default_M(N, L)
    return PacketFamily(GridSpec(N, L), DirectionSet(M), ladder, profile=args.profile)


def cmd_build_family(args):
    from .fileio import write_family

    fam = _family_from_args(args)
    write_family(args.out, fam)
    print(f"wrote {args.out}: N={fam.grid.N} M={fam.directions.M} J={fam.ladder.J} K={fam.ladder.K} "
          f"profile={fam.profile}")


def cmd_transform(args):
    from .fileio import read_family, read_field, write_coefficients
    from .transforms import transform

    fam = read_family(args.family)
    F = transform(fam, read_field(args.inp), args.which)
    write_coefficients(args.out, F)
    print(f"wrote {args.out}")


def cmd_reconstruct(args):
    from .fileio import read_coefficients, write_field
    from .transforms import adjoint

    F = read_coefficients(args.coeffs)
    which = args.adjoint or {"W": "W", "V": "U", "U": "U"}[F.which]
    write_field(args.out, adjoint(F, which))
    print(f"wrote {args.out} ({which}* applied to {F.which} coefficients)")


def cmd_tentnorm(args):
    from .fileio import _write_fld, read_coefficients
    from .tents import A_functional, tent_norm

    F = read_coefficients(args.coeffs)
    A = A_functional(F, args.aperture, args.mode)
    val = tent_norm(A, args.p, F.family.grid)
    print(f"{val:.17g}")
    if args.dump:
        with open(args.dump, "wb") as fh:
            for m in range(A.shape[0]):
                _write_fld(fh, A[m].astype(complex), F.family.grid.L, "spatial")


def cmd_norm(args):
    from .fileio import read_family, read_field
    from .norms import measure

    fam = read_family(args.family)
    f = read_field(args.inp)
    which = args.which
    m = measure(fam, f, os.path.basename(args.inp), apertures=(1.0,),
                with_V=which in ("all", "square", "vertical"), with_maximal=which in ("all", "maximal"))
    keep = {"all": None, "tent": ["hardy_tent"], "square": ["square_function"], "parabolic": ["parabolic"],
            "maximal": ["maximal"], "vertical": ["vertical"]}[which]
    out = []
    for p in args.p:
        rep = m.report(p)
        if keep is not None:
            rep.norms = {k: v for k, v in rep.norms.items() if k in keep + ["lp"]}
            rep.ratios = {}
            rep.__post_init__()
        out.append(rep.to_dict())
        print(f"p={p:.6g} " + " ".join(f"{k}={v:.6g}" for k, v in rep.norms.items()))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=1)


def cmd_verify(args):
    from .config import load_config
    from .verify import run_verify, write_report
    from dataclasses import replace

    cfg = load_config(args.config)
    over = {}
    if args.suite:
        over["suite"] = args.suite
    if args.report:
        over["report"] = args.report
    if args.csv_dir:
        over["csv_dir"] = args.csv_dir
    cfg = replace(cfg, **over)
    crit = [int(c) for c in args.criteria.split(",")] if args.criteria else None
    rep = run_verify(cfg, crit)
    for r in rep.results:
        print(r.summary())
    write_report(rep, cfg.report, cfg.csv_dir)
    print(f"report: {cfg.report}; tables: {cfg.csv_dir}/")
    return rep.exit_status


def cmd_propagate(args):
    from .fileio import read_family, read_field, write_field
    from .grid import lp_norm
    from .transforms import half_wave

    f = read_field(args.inp)
    g = half_wave(f, args.t)
    if args.out:
        write_field(args.out, g)
    row = {"t": args.t, "Lp_ratio": lp_norm(g, args.p, f.grid) / lp_norm(f, args.p, f.grid)}
    if args.family:
        from .norms import parabolic_norms

        fam = read_family(args.family)
        row["parabolic_ratio"] = parabolic_norms(fam, g, (args.p,))[args.p] / parabolic_norms(fam, f, (args.p,))[args.p]
    print(json.dumps({"p": args.p, **row}))


def cmd_suite(args):
    from .fileio import write_field
    from .grid import GridSpec
    from .suite import generate_suite

    N, L = args.grid
    g = GridSpec(N, L)
    os.makedirs(args.out_dir, exist_ok=True)
    sel = args.selection.split(",") if args.selection != "default" else "default"
    for tf in generate_suite(g, sel, args.zeta_max):
        path = os.path.join(args.out_dir, f"{tf.id}.fld")
        write_field(path, tf.field)
        print(path)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fiohardy", description="Wave packet transforms and Hardy-space norms for FIOs.")
    ap.add_argument("--threads", type=int, default=None, help="FFT worker threads (sets FIOHARDY_THREADS)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-family", help="build a packet family and write it to disk")
    p.add_argument("--grid", type=_grid, default=(128, 2 * np.pi), help="N,L")
    p.add_argument("--directions", type=int, default=None, help="M (default derived from the band)")
    p.add_argument("--ladder", type=_ladder, default=None, help="J,sigma_min")
    p.add_argument("--profile", choices=("standard", "tilde"), default="standard")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_family)

    p = sub.add_parser("transform", help="materialized W, V or U transform")
    p.add_argument("--family", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--which", choices=("W", "V", "U"), default="W")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("reconstruct", help="apply the adjoint to stored coefficients")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--adjoint", choices=("W", "U"), default=None, help="default: W for W, U for V")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("tentnorm", help="T^p norm of stored coefficients")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--p", type=_p, required=True)
    p.add_argument("--aperture", type=float, default=1.0)
    p.add_argument("--mode", choices=("box", "ball"), default="box")
    p.add_argument("--dump", default=None, help="write A as one FLD1 block per direction")
    p.set_defaults(func=cmd_tentnorm)

    p = sub.add_parser("norm", help="equivalent Hardy-space norms of one field")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--p", type=_p, nargs="+", required=True)
    p.add_argument("--which", choices=("all", "tent", "square", "parabolic", "maximal", "vertical"), default="all")
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("verify", help="run the acceptance matrix")
    p.add_argument("--config", default=None)
    p.add_argument("--suite", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--csv-dir", default=None)
    p.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,3,5")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("propagate", help="half-wave propagation e^{it sqrt(-Laplacian)}")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--p", type=_p, default=4.0)
    p.add_argument("--family", default=None, help="also report the parabolic-norm ratio")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("suite", help="write the test functions as FLD1 files")
    p.add_argument("--grid", type=_grid, default=(128, 2 * np.pi), help="N,L")
    p.add_argument("--selection", default="default")
    p.add_argument("--zeta-max", type=float, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    if args.threads:
        os.environ["FIOHARDY_THREADS"] = str(args.threads)
    try:
        status = args.func(args)
    except (ValueError, MemoryError, OSError) as exc:
        print(f"fiohardy {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
