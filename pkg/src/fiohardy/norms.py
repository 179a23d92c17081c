"""Equivalent norms on the Hardy spaces for FIOs, computed in one streaming pass.

Names used in reports:

    hardy_tent      ||W f||_{T^p}                 (aperture 1 unless suffixed)
    hardy_via_V     ||V f||_{T^p}
    square_function ||q(D) f||_p + ||S f||_{L^p(S*)}
    parabolic       ||q(D) f||_p + (int ||phi_omega(D) f||_p^p domega)^{1/p}
    maximal         ||q(D) f||_p + (int ||sup_sigma |Phi_sigma(D) phi_omega(D) f| ||_p^p domega)^{1/p}
    vertical        ||q(D) f||_p + ||(int_0^1 |theta_{omega,sigma}(D) f|^2 dsigma/sigma)^{1/2}||_{L^p(S*)}
    lp, low_freq    ||f||_p, ||q(D) f||_p
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.fft as sfft

from .grid import SpatialField, fft_workers, lp_norm
from .packets import PacketFamily
from .tents import TentAccumulator, tent_norm
from .transforms import coarse_field, iter_scale_energy

__all__ = [
    "NormReport",
    "Measurement",
    "measure",
    "hardy_norm",
    "square_function_norm",
    "parabolic_norm",
    "parabolic_norms",
    "maximal_norm",
    "vertical_norm",
    "maximal_sigmas",
    "NORM_NAMES",
]

NORM_NAMES = ("hardy_tent", "hardy_via_V", "square_function", "parabolic", "maximal", "vertical")


@dataclass
class NormReport:
    test_id: str
    p: float
    norms: dict[str, float]
    ratios: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.ratios:
            names = [n for n in NORM_NAMES + ("lp",) if n in self.norms]
            for a, b in combinations(names, 2):
                if self.norms[b] > 0:
                    self.ratios[f"{a}/{b}"] = self.norms[a] / self.norms[b]

    def to_dict(self) -> dict:
        return {"test_id": self.test_id, "p": self.p, "norms": dict(self.norms), "ratios": dict(self.ratios)}


def _lp_sstar(A: np.ndarray, p: float, grid) -> float:
    return tent_norm(A, p, grid)


def _sigma_set(family: PacketFamily, refine: bool = False) -> np.ndarray:
    lad = family.ladder
    s = np.concatenate([[0.0], lad.sigmas, [1.0], 2.0 ** np.arange(1, 7)])
    s = np.unique(s)
    if refine:
        pos = s[s > 0]
        mids = np.sqrt(pos[:-1] * pos[1:])
        s = np.unique(np.concatenate([s, mids, [pos[0] / 2 ** (0.5 / lad.J)]]))
    return s


def maximal_sigmas(family: PacketFamily, refine: bool = False) -> np.ndarray:
    """sigma = 0 (identity), the ladder, 1 and 2^j for j = 1..6; ``refine`` adds log midpoints."""
    return _sigma_set(family, refine)


@dataclass
class Measurement:
    """Raw per-point fields from which the norms at every p are read off."""

    family: PacketFamily
    test_id: str
    qf: np.ndarray
    f: np.ndarray
    A_W: dict[float, np.ndarray] = field(default_factory=dict)
    A_V: np.ndarray | None = None
    S: np.ndarray | None = None
    vert: np.ndarray | None = None
    phi_f: np.ndarray | None = None  # |phi_omega(D) f|, (M, N, N)
    max_f: np.ndarray | None = None
    max_f_refined: np.ndarray | None = None
    W_l2: float | None = None
    V_l2: float | None = None
    kept: dict[float, dict[str, float]] = field(default_factory=dict)

    def compact(self, ps) -> "Measurement":
        """Evaluate the norms at ``ps`` and release the per-point fields."""
        for p in ps:
            self.kept[float(p)] = self.norms(p)
        self.qf = self.f = self.A_V = self.S = self.vert = None
        self.phi_f = self.max_f = self.max_f_refined = None
        self.A_W = {}
        return self

    def norms(self, p: float) -> dict[str, float]:
        if float(p) in self.kept:
            return dict(self.kept[float(p)])
        if self.f is None:
            raise ValueError(f"p={p:g} was not evaluated before the fields were released")
        g = self.family.grid
        low = lp_norm(self.qf, p, g)
        out = {"lp": lp_norm(self.f, p, g), "low_freq": low}
        for lam, A in self.A_W.items():
            key = "hardy_tent" if lam == 1 else f"hardy_tent_lambda{lam:g}"
            out[key] = _lp_sstar(A, p, g)
        if self.A_V is not None:
            out["hardy_via_V"] = _lp_sstar(self.A_V, p, g)
        if self.S is not None:
            out["square_function"] = low + _lp_sstar(self.S, p, g)
            out["S"] = _lp_sstar(self.S, p, g)
        if self.vert is not None:
            out["vertical"] = low + _lp_sstar(self.vert, p, g)
        if self.phi_f is not None:
            out["parabolic"] = low + _lp_sstar(self.phi_f, p, g)
        if self.max_f is not None:
            out["maximal"] = low + _lp_sstar(self.max_f, p, g)
        if self.max_f_refined is not None:
            out["maximal_refined"] = low + _lp_sstar(self.max_f_refined, p, g)
        return out

    def report(self, p: float) -> NormReport:
        return NormReport(self.test_id, p, self.norms(p))


def _phi_channels(family: PacketFamily, fhat: np.ndarray, sigmas=None, refine_sigmas=None):
    """|phi_m(D) f| and its sup over Gaussian dilations, direction block by block."""
    g, M = family.grid, family.directions.M
    N = g.N
    st = family.phi_omega_stack
    phi_abs = np.zeros((M, N, N))
    mx = np.zeros((M, N, N)) if sigmas is not None else None
    mxr = np.zeros((M, N, N)) if refine_sigmas is not None else None
    blk = max(1, 2**21 // N**2)
    za = g.zeta_abs.reshape(-1)
    for m0 in range(0, M, blk):
        m1 = min(M, m0 + blk)
        sl = slice(st.offsets[m0], st.offsets[m1])
        own, idx = st.owner[sl] - m0, st.index[sl]
        base = st.values["phi"][sl] * fhat[idx]

        def field_for(mult):
            out = np.zeros((m1 - m0, N * N), dtype=complex)
            out[own, idx] = base * mult
            return np.abs(sfft.ifft2(out.reshape(m1 - m0, N, N), workers=fft_workers()))

        phi_abs[m0:m1] = field_for(1.0)
        for target, sset in ((mx, sigmas), (mxr, refine_sigmas)):
            if target is None:
                continue
            cur = phi_abs[m0:m1].copy()
            for s in sset:
                if s == 0:
                    continue
                np.maximum(cur, field_for(np.exp(-0.5 * (s * za[idx]) ** 2)), out=cur)
            target[m0:m1] = cur
    return phi_abs, mx, mxr


def measure(family: PacketFamily, f: SpatialField, test_id: str = "f", apertures=(1.0, 2.0, 4.0),
            with_V: bool = True, with_maximal: bool = True, refine_maximal: bool = False) -> Measurement:
    """One pass over the W channels (all apertures), the V channels and the phi_omega channels."""
    g = family.grid
    g.check_same(f.grid)
    N, M = g.N, family.directions.M
    fhat = sfft.fft2(f.data, workers=fft_workers())
    qf = sfft.ifft2(family.q * fhat, workers=fft_workers())
    meas = Measurement(family, test_id, qf, f.data.copy())
    dx2, w, dw = g.dx**2, family.ladder.weight, family.directions.weight

    # W pass
    acc = TentAccumulator(family, apertures)
    l2 = 0.0
    for k, Nk, Ghat in iter_scale_energy(family, f, "W"):
        l2 += Ghat[:, 0, 0].real.sum() * w * dw * dx2
        acc.add_scale_hat(Ghat, Nk, family.ladder.sigmas[k], w)
    cW = coarse_field(family, f, "W")
    l2 += 2 * np.pi * dx2 * np.sum(np.abs(cW) ** 2)
    acc.add_coarse(cW)
    meas.A_W = acc.result()
    meas.W_l2 = float(np.sqrt(l2))

    if with_V:
        accS = TentAccumulator(family, (1.0,))
        vert = TentAccumulator(family, (1.0,))  # plain sum of w |V f|^2, no averaging
        l2 = 0.0
        for k, Nk, Ghat in iter_scale_energy(family, f, "V"):
            l2 += Ghat[:, 0, 0].real.sum() * w * dw * dx2
            vert._add(1.0, 0, M, Nk, w * Ghat)
            accS.add_scale_hat(Ghat, Nk, family.ladder.sigmas[k], w)
        S2 = accS.A2[1.0]
        cV = coarse_field(family, f, "V")
        l2 += 2 * np.pi * dx2 * np.sum(np.abs(cV) ** 2)
        accS.add_coarse(cV)
        meas.S = np.sqrt(np.maximum(S2, 0))
        meas.A_V = accS.result()[1.0]
        meas.vert = vert.result()[1.0]
        meas.V_l2 = float(np.sqrt(l2))

    sig = maximal_sigmas(family) if with_maximal else None
    sigr = maximal_sigmas(family, refine=True) if (with_maximal and refine_maximal) else None
    meas.phi_f, meas.max_f, meas.max_f_refined = _phi_channels(family, fhat.reshape(-1), sig, sigr)
    return meas


# single-norm entry points --------------------------------------------------------


def hardy_norm(family: PacketFamily, f: SpatialField, p: float, via: str = "W", aperture: float = 1.0) -> float:
    from .tents import A_functional_streaming

    if via not in ("W", "V"):
        raise ValueError("via must be 'W' or 'V'")
    A = A_functional_streaming(family, f, via, (aperture,))[float(aperture)]
    return tent_norm(A, p, family.grid)


def square_function_norm(family: PacketFamily, f: SpatialField, p: float) -> float:
    m = measure(family, f, apertures=(1.0,), with_maximal=False)
    return m.norms(p)["square_function"]


def vertical_norm(family: PacketFamily, f: SpatialField, p: float) -> float:
    m = measure(family, f, apertures=(1.0,), with_maximal=False)
    return m.norms(p)["vertical"]


def _low(family, f, p):
    fhat = sfft.fft2(f.data, workers=fft_workers())
    return lp_norm(sfft.ifft2(family.q * fhat, workers=fft_workers()), p, family.grid), fhat


def parabolic_norm(family: PacketFamily, f: SpatialField, p: float) -> float:
    low, fhat = _low(family, f, p)
    phi_abs, _, _ = _phi_channels(family, fhat.reshape(-1))
    return low + _lp_sstar(phi_abs, p, family.grid)


def parabolic_norms(family: PacketFamily, f: SpatialField, ps) -> dict[float, float]:
    """parabolic_norm at several exponents from one pass over the phi_omega channels."""
    family.grid.check_same(f.grid)
    fhat = sfft.fft2(f.data, workers=fft_workers())
    qf = sfft.ifft2(family.q * fhat, workers=fft_workers())
    phi_abs, _, _ = _phi_channels(family, fhat.reshape(-1))
    return {float(p): lp_norm(qf, p, family.grid) + _lp_sstar(phi_abs, p, family.grid) for p in ps}


def maximal_norm(family: PacketFamily, f: SpatialField, p: float, refine: bool = False) -> float:
    low, fhat = _low(family, f, p)
    _, mx, _ = _phi_channels(family, fhat.reshape(-1), maximal_sigmas(family, refine))
    return low + _lp_sstar(mx, p, family.grid)
