"""Acceptance matrix: the ten numbered criteria, shared by the test suite and ``fiohardy verify``.

Every asserted number is stored as a :class:`Check` carrying its value, bound and
pass flag.  Diagnostics that are reported without a bound go to ``info``; tables
destined for CSV go to ``tables``.
"""
from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import RunConfig
from .geometry import ball_volume, ball_volume_mc, fit_slope, slab_volume, slab_volume_exact
from .grid import SpatialField, l2_norm
from .norms import Measurement, measure, parabolic_norms
from .packets import PacketFamily, packet_decay_profile, zoom_decay_profile, zoom_symbol
from .suite import TestFunction, generate_suite
from .transforms import half_wave, reproduce

__all__ = ["Check", "CriterionResult", "VerifyContext", "VerifyReport", "CRITERIA", "run_verify",
           "write_report"]

log = logging.getLogger(__name__)

DECAY_NODES = (2, 7, 14)
DECAY_DIRECTION = 37
DECAY_FIT = (1e4, 1e6)
LATTICE_DECAY_FIT = (10.0, 1e3)


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str  # "<=", ">=" or "~" (|value - target| <= bound)
    target: float | None = None

    @property
    def passed(self) -> bool:
        v = self.value
        if not np.isfinite(v):
            return False
        if self.relation == "<=":
            return v <= self.bound
        if self.relation == ">=":
            return v >= self.bound
        return abs(v - self.target) <= self.bound

    def describe(self) -> str:
        if self.relation == "~":
            return f"{self.name} = {self.value:.4g} (target {self.target:g} +- {self.bound:g})"
        return f"{self.name} = {self.value:.4g} ({self.relation} {self.bound:g})"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = bool(self.passed)
        return d


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    tables: dict[str, list[dict]] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def worst(self) -> Check | None:
        bad = [c for c in self.checks if not c.passed]
        return bad[0] if bad else None

    def summary(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        w = self.worst()
        tail = f"; first failure: {w.describe()}" if w else ""
        return f"criterion {self.number} {tag}: {self.title} [{len(self.checks)} checks, {self.seconds:.1f}s]{tail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed, "seconds": self.seconds,
                "checks": [c.to_dict() for c in self.checks], "info": _jsonable(self.info)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


class VerifyContext:
    """Lazily built families, suites and measurements shared across criteria."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._cache: dict = {}

    def _get(self, key, build):
        if key not in self._cache:
            t = time.perf_counter()
            self._cache[key] = build()
            log.info("built %s in %.1fs", key, time.perf_counter() - t)
        return self._cache[key]

    @property
    def family(self) -> PacketFamily:
        return self._get("family", lambda: PacketFamily(*self.cfg.build(), profile=self.cfg.profile))

    @property
    def tilde(self) -> PacketFamily:
        return self._get("tilde", lambda: PacketFamily(*self.cfg.build(), profile="tilde"))

    @property
    def refined_family(self) -> PacketFamily:
        r = self.cfg.refined()
        return self._get("refined_family", lambda: PacketFamily(*r.build(), profile=self.cfg.profile))

    @property
    def exponents(self) -> tuple[float, ...]:
        """Exponents kept by every measurement: the configured ones and those the criteria read."""
        return tuple(sorted({float(p) for p in self.cfg.ps} | {4 / 3, 2.0, 4.0}))

    @property
    def zeta_max(self) -> float:
        return self.family.grid.resolved_band[1]

    @property
    def suite(self) -> list[TestFunction]:
        return self._get("suite", lambda: generate_suite(self.family.grid, self.cfg.suite, self.zeta_max))

    @property
    def refined_suite(self) -> list[TestFunction]:
        return self._get("refined_suite",
                         lambda: generate_suite(self.refined_family.grid, self.cfg.suite, self.zeta_max))

    @property
    def measurements(self) -> dict[str, Measurement]:
        def build():
            out = {}
            for tf in self.suite:
                t = time.perf_counter()
                out[tf.id] = measure(self.family, tf.field, tf.id, apertures=self.cfg.apertures,
                                     refine_maximal=True).compact(self.exponents)
                log.info("measured %s in %.1fs", tf.id, time.perf_counter() - t)
            return out

        return self._get("measurements", build)

    @property
    def refined_measurements(self) -> dict[str, Measurement]:
        def build():
            t0 = time.perf_counter()
            out = {tf.id: measure(self.refined_family, tf.field, tf.id, apertures=(1.0,), with_V=False,
                                  with_maximal=False).compact(self.exponents) for tf in self.refined_suite}
            self._cache["refined_seconds"] = time.perf_counter() - t0
            return out

        return self._get("refined_measurements", build)


def _rel_err(a: SpatialField, b: SpatialField) -> float:
    return l2_norm(SpatialField(a.grid, a.data - b.data)) / l2_norm(b)


# criteria ------------------------------------------------------------------------


def criterion_1(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(1, "exact discrete identities")
    fam = ctx.family
    pr = np.abs(fam.partition_residual())
    band = ctx.family.grid.zeta_abs <= fam.band[1]
    res.checks.append(Check("partition residual (N=%d)" % fam.grid.N, float(pr[band].max()),
                            cfg.tol("partition"), "<="))
    for tf in ctx.suite:
        for fw, bw in (("W", "W"), ("V", "U")):
            e = _rel_err(reproduce(fam, tf.field, fw, bw), tf.field)
            res.checks.append(Check(f"{bw}*{fw} {tf.id} (N={fam.grid.N})", e, cfg.tol("reproduce"), "<="))
    # the timed run on the refined grid
    t0 = time.perf_counter()
    rf = ctx.refined_family
    build_s = time.perf_counter() - t0
    t0 = time.perf_counter()
    pr = np.abs(rf.partition_residual())
    res.checks.append(Check("partition residual (N=%d)" % rf.grid.N,
                            float(pr[rf.grid.zeta_abs <= rf.band[1]].max()), cfg.tol("partition"), "<="))
    for tf in ctx.refined_suite:
        for fw, bw in (("W", "W"), ("V", "U")):
            e = _rel_err(reproduce(rf, tf.field, fw, bw), tf.field)
            res.checks.append(Check(f"{bw}*{fw} {tf.id} (N={rf.grid.N})", e, cfg.tol("reproduce"), "<="))
    run_s = time.perf_counter() - t0
    res.checks.append(Check(f"identity runtime at N={rf.grid.N} [s]", run_s, 60.0, "<="))
    res.info.update(family_build_seconds=build_s, identity_seconds=run_s, cpu_count=os.cpu_count())
    return res


def criterion_2(ctx: VerifyContext) -> CriterionResult:
    res = CriterionResult(2, "W near-isometry")
    for tid, m in ctx.measurements.items():
        res.checks.append(Check(f"||Wf||/||f|| {tid}", m.W_l2, ctx.cfg.tol("isometry"), "~", 1.0))
    return res


def _channel_region_violation(fam: PacketFamily, key: str, loose: bool) -> int:
    """Count stored nonzeros outside the dyadic-parabolic region of their channel."""
    g = fam.grid
    za, zang = g.zeta_abs.reshape(-1), g.zeta_angle.reshape(-1)
    bad = 0
    for k, sb in enumerate(fam.scales):
        sig = sb.sigma
        v = sb.values[key]
        nz = v != 0
        alpha = sb.owner * fam.directions.weight
        ch = 2 * np.abs(np.sin((zang[sb.index] - alpha) / 2))
        r = za[sb.index]
        if loose:
            inside = (r >= 0.5 / sig) & (r <= 2 / sig) & (ch <= 2 * np.sqrt(sig))
        else:
            inside = (r >= fam.bank.Psi.lo / sig) & (r <= fam.bank.Psi.hi / sig)
            if key == "psi":
                inside &= ch <= fam.bank.phi.hi * np.sqrt(sig)
            else:
                inside &= ch <= 2 / np.sqrt(np.maximum(r, 1e-300))
        bad += int(np.count_nonzero(nz & ~inside))
    return bad


def _dense_region_violation(fam: PacketFamily, key: str, dir_stride: int = 64) -> int:
    """Independent route: evaluate the symbol on the whole lattice and look outside the region."""
    g = fam.grid
    za, zang = g.zeta_abs, g.zeta_angle
    bad = 0
    for k in range(fam.ladder.K):
        sig = fam.ladder.sigmas[k]
        for m in range(0, fam.directions.M, dir_stride):
            vals = fam.symbol_at(key, m, k, za, zang)
            ch = 2 * np.abs(np.sin((zang - m * fam.directions.weight) / 2))
            inside = (za >= 0.5 / sig) & (za <= 2 / sig) & (ch <= 2 * np.sqrt(sig))
            bad += int(np.count_nonzero((vals != 0) & ~inside))
    return bad


def criterion_3(ctx: VerifyContext) -> CriterionResult:
    res = CriterionResult(3, "support exactness")
    fam = ctx.family
    g = fam.grid
    for key in ("psi", "theta", "chi"):
        res.checks.append(Check(f"{key} nonzeros off the parabolic region", _channel_region_violation(fam, key, True),
                                0, "<="))
        res.checks.append(Check(f"{key} nonzeros off the profile supports", _channel_region_violation(fam, key, False),
                                0, "<="))
        res.checks.append(Check(f"{key} lattice evaluation off the region", _dense_region_violation(fam, key), 0, "<="))
    st = fam.phi_omega_stack
    za = g.zeta_abs.reshape(-1)[st.index]
    zang = g.zeta_angle.reshape(-1)[st.index]
    ch = 2 * np.abs(np.sin((zang - st.owner * fam.directions.weight) / 2))
    outside = (za < 1 / 8) | (ch > 2 / np.sqrt(np.maximum(za, 1e-300)))
    res.checks.append(Check("phi_omega nonzeros off its region",
                            int(np.count_nonzero((st.values["phi"] != 0) & outside)), 0, "<="))
    dense_bad = 0
    for m in range(0, fam.directions.M, 16):
        v = fam.eval_phi_omega(m * fam.directions.weight, g.zeta_abs, g.zeta_angle)
        c = 2 * np.abs(np.sin((g.zeta_angle - m * fam.directions.weight) / 2))
        out = (g.zeta_abs < 1 / 8) | (c > 2 / np.sqrt(np.maximum(g.zeta_abs, 1e-300)))
        dense_bad += int(np.count_nonzero((v != 0) & out))
    res.checks.append(Check("phi_omega lattice evaluation off its region", dense_bad, 0, "<="))
    res.checks.append(Check("s nonzeros for |zeta| > 2", int(np.count_nonzero(fam.s[g.zeta_abs > 2])), 0, "<="))
    res.checks.append(Check("packets at zeta = 0", float(sum(np.abs(sb.values["psi"][sb.index == 0]).sum()
                                                              for sb in fam.scales)), 0, "<="))
    res.info["s_offsupport_residual"] = float(fam.s_offsupport_residual)
    return res


def _volume_rows():
    rows = []
    for tau in np.geomspace(0.01, 0.1, 6):
        mc, se = ball_volume_mc(float(tau), samples=200_000, seed=1)
        rows.append({"regime": "small", "tau": tau, "quad": ball_volume(float(tau)), "mc": mc, "mc_se": se})
    for tau in np.geomspace(10.0, 100.0, 6):
        mc, se = ball_volume_mc(float(tau), samples=200_000, seed=1)
        rows.append({"regime": "large", "tau": tau, "quad": ball_volume(float(tau)), "mc": mc, "mc_se": se})
    return rows


def _slab_rows():
    rows = []
    sig = 2.0**-12
    for regime, js in (("below", range(1, 11)), ("above", range(14, 23))):
        for j in js:
            mc, se = slab_volume(j, sig, alpha=0.4, samples=400_000, seed=j)
            rows.append({"regime": regime, "j": j, "scale": 2.0**j * sig, "exact": slab_volume_exact(j, sig),
                         "mc": mc, "mc_se": se})
    return rows


def criterion_4(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(4, "scaling exponents")
    fam = ctx.family
    sig = fam.ladder.sigmas
    res.checks.append(Check("slope c_sigma", fit_slope(sig, fam.c_ladder), cfg.tol("slope_c"), "~", -0.25))
    m = DECAY_DIRECTION
    sup_c, peak_c, sup_l, peak_l = [], [], [], []
    for k, sb in enumerate(fam.scales):
        vals, s, hp, hq = zoom_symbol(fam, "psi", m, k, n=256)
        sup_c.append(np.abs(vals).max())
        peak_c.append(abs(vals.sum()) * hp * hq / (2 * np.pi) ** 2)
        sup_l.append(np.abs(sb.values["psi"]).max())
        per_dir = np.bincount(sb.owner, weights=sb.values["psi"], minlength=fam.directions.M)
        peak_l.append(np.abs(per_dir).max() / fam.grid.L**2)
    res.checks.append(Check("slope sup|psi| (continuum)", fit_slope(sig, sup_c), cfg.tol("slope_sup"), "~", -0.25))
    res.checks.append(Check("slope peak|F^-1 psi| (continuum)", fit_slope(sig, peak_c), cfg.tol("slope_peak"),
                            "~", -1.75))
    res.info.update(slope_sup_lattice=fit_slope(sig, sup_l), slope_peak_lattice=fit_slope(sig, peak_l),
                    peak_times_sigma_7_4=(np.array(peak_c) * sig**1.75).tolist())
    vol = _volume_rows()
    tol_v = cfg.tol("slope_volume")
    for regime, target in (("small", 4.0), ("large", 2.0)):
        rows = [r for r in vol if r["regime"] == regime]
        t = [r["tau"] for r in rows]
        res.checks.append(Check(f"slope {regime}-ball volume (quadrature)", fit_slope(t, [r["quad"] for r in rows]),
                                tol_v, "~", target))
        res.checks.append(Check(f"slope {regime}-ball volume (Monte Carlo)", fit_slope(t, [r["mc"] for r in rows]),
                                tol_v, "~", target))
    z = max(abs(r["mc"] - r["quad"]) / r["mc_se"] for r in vol)
    res.checks.append(Check("ball volume quadrature vs Monte Carlo [std errors]", z, 5.0, "<="))
    slab = _slab_rows()
    for regime, target in (("below", 1.5), ("above", 1.0)):
        rows = [r for r in slab if r["regime"] == regime]
        sc = [r["scale"] for r in rows]
        res.checks.append(Check(f"slope slab {regime} scale 1 (exact)", fit_slope(sc, [r["exact"] for r in rows]),
                                cfg.tol("slope_slab"), "~", target))
        res.checks.append(Check(f"slope slab {regime} scale 1 (Monte Carlo)", fit_slope(sc, [r["mc"] for r in rows]),
                                cfg.tol("slope_slab"), "~", target))
    res.tables["volume_slopes"] = vol + [{**r, "tau": None} for r in slab]
    return res


def criterion_5(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(5, "angular energy")
    fam = ctx.family
    g = fam.grid
    E = fam.angular_energy
    za = g.zeta_abs
    sel = (za >= 1) & (za <= ctx.zeta_max)
    res.checks.append(Check("max/min angular energy on 1 <= |zeta| <= zeta_max", float(E[sel].max() / E[sel].min()),
                            cfg.tol("angular_maxmin"), "<="))
    shells = np.rint(za / g.dzeta).astype(int)
    worst, rows = 0.0, []
    for r in range(1, int(ctx.zeta_max / g.dzeta) + 1):
        v = E[shells == r]
        rv = float(v.var() / v.mean() ** 2)
        rows.append({"shell": r, "mean": float(v.mean()), "var_over_mean2": rv})
        worst = max(worst, rv)
    res.checks.append(Check("shell-wise var/mean^2 of the angular energy", worst, cfg.tol("radiality"), "<="))
    res.tables["angular_energy"] = rows
    return res


def criterion_6(ctx: VerifyContext) -> CriterionResult:
    res = CriterionResult(6, "packet decay")
    fam, til = ctx.family, ctx.tilde
    m = DECAY_DIRECTION
    rows = []
    for k in DECAY_NODES:
        s = fam.ladder.sigmas[k]
        a = m * fam.directions.weight
        nu = a + np.sqrt(s) / 20
        for key in ("psi", "theta", "chi", "eta"):
            vals, sig, hp, hq = zoom_symbol(fam, key, m, k, n=512, tilde=til, nu=nu)
            rep = zoom_decay_profile(vals, sig, hp, hq, fit_range=DECAY_FIT)
            res.checks.append(Check(f"decay slope {key} k={k}", rep.slope, ctx.cfg.tol("decay_slope"), "<="))
            lat = np.nan
            if key != "eta":
                mult = getattr(fam, key)(m, k)
                if mult.index.size:
                    lat = packet_decay_profile(mult, a, s, fit_range=LATTICE_DECAY_FIT).slope
            rows.append({"kernel": key, "k": k, "sigma": s, "zoom_slope": rep.slope, "zoom_fit": str(DECAY_FIT),
                         "lattice_slope": lat, "lattice_fit": str(LATTICE_DECAY_FIT), "peak": rep.peak})
    res.tables["decay_fits"] = rows
    return res


def criterion_7(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(7, "aperture growth")
    rows = []
    lams = sorted(float(a) for a in cfg.apertures)
    for tid, m in ctx.measurements.items():
        n4, n43 = m.norms(4.0), m.norms(4 / 3)
        key = lambda l: "hardy_tent" if l == 1 else f"hardy_tent_lambda{l:g}"
        r4 = n4[key(max(lams))] / n4[key(1.0)]
        expo = fit_slope(lams, [n43[key(l)] for l in lams])
        res.checks.append(Check(f"p=4 ratio lambda={max(lams):g}/1 {tid}", r4, cfg.tol("aperture_p4"), "<="))
        res.checks.append(Check(f"p=4/3 growth exponent {tid}", expo, cfg.tol("aperture_exponent"), "<="))
        for p, n in ((4 / 3, n43), (4.0, n4)):
            for l in lams:
                rows.append({"test_id": tid, "p": p, "aperture": l, "tent_norm": n[key(l)],
                             "ratio_to_lambda1": n[key(l)] / n[key(1.0)]})
    res.tables["aperture_growth"] = rows
    return res


def criterion_8(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(8, "parabolic vs tent norm")
    meas, ref = ctx.measurements, ctx.refined_measurements
    rows = []
    for p in (4 / 3, 4.0):
        ratios = {tid: m.norms(p)["parabolic"] / m.norms(p)["hardy_tent"] for tid, m in meas.items()}
        Cstar = max(max(ratios.values()), 1 / min(ratios.values()))
        res.checks.append(Check(f"C* at p={p:.4g}", Cstar, cfg.tol("equivalence_C"), "<="))
        for tid, r in ratios.items():
            n2 = ref[tid].norms(p)
            r2 = n2["parabolic"] / n2["hardy_tent"]
            drift = abs(r2 / r - 1)
            res.checks.append(Check(f"refinement drift p={p:.4g} {tid}", drift, cfg.tol("refinement_drift"), "<="))
            rows.append({"test_id": tid, "p": p, "ratio_N": r, "ratio_refined": r2, "drift": drift})
    for tid, m in meas.items():
        n2 = m.norms(2.0)
        lp = n2["lp"]
        for name in ("hardy_tent", "square_function", "parabolic", "maximal", "vertical"):
            q = n2[name] / lp
            res.checks.append(Check(f"p=2 {name}/||f|| {tid} (factor)", max(q, 1 / q), cfg.tol("l2_factor"), "<="))
    res.tables["refinement"] = rows
    res.info["refined_measure_seconds"] = ctx._cache.get("refined_seconds")
    return res


def criterion_9(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(9, "corollary equivalences")
    meas = ctx.measurements
    for p in (4 / 3, 4.0):
        for name in ("square_function", "maximal", "vertical"):
            r = [m.norms(p)[name] / m.norms(p)["parabolic"] for m in meas.values()]
            res.checks.append(Check(f"spread {name}/parabolic p={p:.4g}", max(r) / min(r),
                                    cfg.tol("corollary_spread"), "<="))
    for tid, m in meas.items():
        for p in (4 / 3, 2.0, 4.0):
            n = m.norms(p)
            res.checks.append(Check(f"maximal refinement change p={p:.4g} {tid}",
                                    abs(n["maximal_refined"] / n["maximal"] - 1), cfg.tol("maximal_stability"), "<="))
    return res


def criterion_10(ctx: VerifyContext) -> CriterionResult:
    cfg = ctx.cfg
    res = CriterionResult(10, "half-wave invariance")
    fam = ctx.family
    g = fam.grid
    from .grid import lp_norm

    rows = []
    band = cfg.tol("halfwave_band")
    for tf in ctx.suite:
        base = parabolic_norms(fam, tf.field, (2.0, 4.0))
        l4 = lp_norm(tf.field, 4.0, g)
        for t in cfg.times:
            ft = half_wave(tf.field, t)
            nt = parabolic_norms(fam, ft, (2.0, 4.0))
            r4, r2 = nt[4.0] / base[4.0], nt[2.0] / base[2.0]
            res.checks.append(Check(f"p=4 ratio {tf.id} t={t:g} (upper)", r4, band, "<="))
            res.checks.append(Check(f"p=4 ratio {tf.id} t={t:g} (lower)", r4, 1 / band, ">="))
            res.checks.append(Check(f"p=2 ratio {tf.id} t={t:g}", r2, cfg.tol("unitarity"), "~", 1.0))
            rows.append({"test_id": tf.id, "t": t, "parabolic_ratio_p4": r4, "parabolic_ratio_p2": r2,
                         "L4_ratio": lp_norm(ft, 4.0, g) / l4})
    res.tables["half_wave"] = rows
    return res


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


@dataclass
class VerifyReport:
    results: list[CriterionResult]
    norm_reports: list[dict]
    config: str
    seconds: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_status(self) -> int:
        return 0 if self.passed else 1


def _norm_reports(ctx: VerifyContext) -> list[dict]:
    out = []
    if "measurements" not in ctx._cache:
        return out
    for m in ctx.measurements.values():
        for p in ctx.cfg.ps:
            out.append(m.report(p).to_dict())
    return out


def run_verify(cfg: RunConfig, criteria=None, ctx: VerifyContext | None = None) -> VerifyReport:
    from .config import serialize_config

    if not ctx:
        ctx = VerifyContext(cfg)
    if not ctx.suite:
        raise ValueError("empty suite")
    t0 = time.perf_counter()
    results = []
    for i in criteria or sorted(CRITERIA):
        t = time.perf_counter()
        try:
            r = CRITERIA[i](ctx)
        except MemoryError as exc:
            raise MemoryError(f"criterion {i}: {exc}") from exc
        r.seconds = time.perf_counter() - t
        log.info(r.summary())
        results.append(r)
    return VerifyReport(results, _norm_reports(ctx), serialize_config(cfg), time.perf_counter() - t0)


def write_report(rep: VerifyReport, path: str, csv_dir: str | None = None):
    doc = {"passed": rep.passed, "seconds": rep.seconds, "config": rep.config,
           "criteria": [r.to_dict() for r in rep.results], "norms": rep.norm_reports}
    with open(path, "w") as fh:
        json.dump(_jsonable(doc), fh, indent=1)
    if csv_dir is None:
        return
    os.makedirs(csv_dir, exist_ok=True)
    tables: dict[str, list[dict]] = {}
    for r in rep.results:
        tables.update(r.tables)
    rows = []
    for nr in rep.norm_reports:
        for name, val in nr["ratios"].items():
            rows.append({"test_id": nr["test_id"], "p": nr["p"], "pair": name, "ratio": val})
    if rows:
        tables["ratio_vs_p"] = rows
    for name, rows in tables.items():
        keys = list(dict.fromkeys(k for row in rows for k in row))
        with open(os.path.join(csv_dir, f"{name}.csv"), "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for row in rows:
                w.writerow(_jsonable(row))
