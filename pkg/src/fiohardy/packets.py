"""Wave packet multipliers on the frequency lattice.

All banks are stored sparsely as (owner direction, flat lattice index, value)
triples sorted by owner.  Dense N x N arrays are kept only for the radial
symbols r, s, q, h and for the angular energy int phi_nu(zeta)^2 dnu.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import DirectionSet, ScaleLadder, chord
from .grid import GridSpec, Multiplier
from .profiles import (
    RadialProfile,
    bump,
    calderon_normalize,
    flat_annulus,
    gaussian,
    ladder_partition,
    plateau,
)

__all__ = [
    "CutoffBank",
    "c_sigma",
    "SparseStack",
    "ScaleBank",
    "PacketFamily",
    "direction_pairs",
    "TAU_NODES_PER_OCTAVE",
    "packet_change_ratio",
    "packet_decay_profile",
    "DecayReport",
    "kernel",
    "zoom_window",
    "zoom_symbol",
    "zoom_decay_profile",
]

TAU_NODES_PER_OCTAVE = 16
ANGULAR_FLOOR = 1e-8


@dataclass(frozen=True)
class CutoffBank:
    """Radial profiles defining one packet family."""

    phi: RadialProfile  # angular profile, evaluated at |zeta_hat - omega| / sqrt(sigma)
    Psi: RadialProfile  # Calderon-normalized annular profile
    Psi_continuum: RadialProfile
    q: RadialProfile
    h: RadialProfile
    tag: str = "standard"
    J: int | None = None

    @staticmethod
    def Phi_max(t):
        return gaussian()(t)

    @classmethod
    def standard(cls, J: int | None = None, phi_support=(1 / 8, 1 / 4), psi_support=(0.8, 1.25)):
        """phi = 1 near 0 and 0 beyond 1/4; Psi a bump on [4/5, 5/4].

        With ``J`` given, Psi is renormalized so the ladder sum is exactly 1.
        """
        raw = bump(*psi_support)
        cont = calderon_normalize(raw, mode="continuum")
        Psi = calderon_normalize(raw, J, mode="discrete") if J is not None else cont
        q = plateau(2.0, 4.0)
        return cls(plateau(*phi_support), Psi, cont, q, q, "standard", J)

    @classmethod
    def tilde(cls, J: int | None = None):
        """phi = 1 on [0, 3/4], 0 beyond 1; Psi = 1 on [2/3, 3/2], 0 off [1/2, 2]."""
        cont = flat_annulus()
        Psi = calderon_normalize(cont, J, mode="discrete") if J is not None else cont
        q = plateau(2.0, 4.0)
        return cls(plateau(0.75, 1.0), Psi, cont, q, q, "tilde", J)


def c_sigma(sigma: float, phi: RadialProfile, nodes: int = 8192, ref_angle: float = 0.0) -> float:
    """(int_{S^1} phi((e - nu)/sqrt(sigma))^2 dnu)^{-1/2} by the periodic trapezoid rule."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    nu = ref_angle + 2 * np.pi * np.arange(nodes) / nodes
    vals = phi(chord(ref_angle, nu) / np.sqrt(sigma)) ** 2
    if np.count_nonzero(vals) < 8:
        raise ValueError(f"angular profile unresolved at sigma={sigma:g} with {nodes} nodes")
    return float((vals.sum() * 2 * np.pi / nodes) ** -0.5)


def direction_pairs(angle: np.ndarray, bound: np.ndarray, M: int):
    """All (m, i) with chord(angle[i], 2 pi m / M) < bound[i].

    ``angle`` and ``bound`` are flat arrays over candidate lattice points.
    Returns (m, i) sorted by m then i.
    """
    sel = np.flatnonzero(bound > 0)
    if sel.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    b = np.minimum(bound[sel], 2.0)
    half = 2 * np.arcsin(b / 2)  # angular half width
    step = 2 * np.pi / M
    lo = np.ceil((angle[sel] - half) / step).astype(np.int64)
    hi = np.floor((angle[sel] + half) / step).astype(np.int64)
    hi = np.minimum(hi, lo + M - 1)
    cnt = np.maximum(hi - lo + 1, 0)
    i = np.repeat(sel, cnt)
    start = np.repeat(lo, cnt)
    off = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    m = np.mod(start + off, M)
    keep = chord(angle[i], m * step) < bound[i]
    m, i = m[keep], i[keep]
    order = np.lexsort((i, m))
    return m[order], i[order]


@dataclass
class SparseStack:
    """Per-direction sparse multipliers concatenated and sorted by owner."""

    M: int
    owner: np.ndarray
    index: np.ndarray
    values: dict[str, np.ndarray]
    offsets: np.ndarray = field(init=False)

    def __post_init__(self):
        self.offsets = np.searchsorted(self.owner, np.arange(self.M + 1))

    def slice(self, m: int) -> slice:
        return slice(self.offsets[m], self.offsets[m + 1])

    def lookup(self, m: np.ndarray, i: np.ndarray, key: str, npts: int) -> np.ndarray:
        """Values at (m, i) pairs, zero where the pair is absent."""
        stack_key = self.owner * npts + self.index
        q = m * npts + i
        pos = np.searchsorted(stack_key, q)
        pos = np.minimum(pos, len(stack_key) - 1)
        hit = stack_key[pos] == q if len(stack_key) else np.zeros(q.shape, bool)
        out = np.zeros(q.shape)
        out[hit] = self.values[key][pos[hit]]
        return out

    @property
    def nnz(self) -> int:
        return int(self.owner.size)


@dataclass
class ScaleBank(SparseStack):
    k: int = 0
    sigma: float = 1.0


class PacketFamily:
    """Multiplier bank {psi, theta, chi, phi_omega, r, s, q, h} over (direction, scale).

    ``discrete=True`` uses the ladder-renormalized Psi and an angular
    renormalization of psi so that W*W = U*V = Id hold to roundoff on the band
    |zeta| < Psi_lo / sigma_{K+1}.
    """

    def __init__(self, grid: GridSpec, directions: DirectionSet, ladder: ScaleLadder,
                 profile: str = "standard", discrete: bool | None = None,
                 tau_nodes_per_octave: int = TAU_NODES_PER_OCTAVE, c_nodes: int = 8192):
        self.grid, self.directions, self.ladder = grid, directions, ladder
        if discrete is None:
            discrete = profile == "standard"
        self.discrete = bool(discrete)
        J = ladder.J if self.discrete else None
        if profile == "standard":
            self.bank = CutoffBank.standard(J)
        elif profile == "tilde":
            self.bank = CutoffBank.tilde(J)
        else:
            raise ValueError(f"unknown profile {profile!r}")
        self.profile = profile
        self.tau_nodes_per_octave = tau_nodes_per_octave
        self.c_nodes = c_nodes
        self._check_lattice()
        self.c_ladder = np.array([c_sigma(s, self.bank.phi, c_nodes) for s in ladder.sigmas])
        self._build_phi_omega()
        self._build_scales()
        self._build_radial()

    # -- construction -----------------------------------------------------

    def _check_lattice(self):
        g, lad = self.grid, self.ladder
        top = self.bank.Psi.hi / lad.sigma_min
        if top > g.nyquist:
            raise ValueError(f"finest packet support |zeta| <= {top:g} exceeds Nyquist {g.nyquist:g}")
        if 2 * lad.sigma_min < g.dx:
            raise ValueError(f"box 2 sigma_min = {2 * lad.sigma_min:g} is below one grid cell {g.dx:g}")
        self.directions.check_resolves(lad.sigma_min)

    @property
    def band(self) -> tuple[float, float]:
        """Frequencies where the discrete partition identities are exact."""
        return (0.0, self.ladder.band_top(self.bank.Psi.lo))

    @property
    def npts(self) -> int:
        return self.grid.N * self.grid.N

    def _tau_nodes(self):
        zmax = float(self.grid.zeta_abs.max())
        n = self.tau_nodes_per_octave
        jmax = int(np.ceil(n * np.log2(4 * zmax / self.bank.Psi.lo))) + 1
        tau = 4.0 * 2.0 ** (-np.arange(jmax + 1) / n)
        wt = np.full(tau.shape, np.log(2) / n)
        wt[0] *= 0.5  # trapezoid endpoint at tau = 4
        return tau, wt

    def _build_phi_omega(self):
        g, b, M = self.grid, self.bank, self.directions.M
        za = g.zeta_abs.reshape(-1)
        ang = g.zeta_angle.reshape(-1)
        tau, wt = self._tau_nodes()
        self.tau_nodes, self.tau_weights = tau, wt
        self.c_tau = np.array([c_sigma(t, b.phi, self.c_nodes) for t in tau])
        # phi_omega(zeta) needs tau |zeta| in supp Psi and tau <= 4
        with np.errstate(divide="ignore"):
            tmax = np.where(za > 0, np.minimum(4.0, b.Psi.hi / np.where(za > 0, za, 1)), 0.0)
        tmax[za * 4.0 < b.Psi.lo] = 0.0
        bound = b.phi.hi * np.sqrt(tmax)
        m, i = direction_pairs(ang, bound, M)
        z = za[i]
        ch = chord(ang[i], m * self.directions.weight)
        val = np.zeros(m.shape)
        for t, w, c in zip(tau, wt, self.c_tau):
            sel = (t * z >= b.Psi.lo) & (t * z <= b.Psi.hi) & (ch < b.phi.hi * np.sqrt(t))
            if np.any(sel):
                val[sel] += w * c * b.Psi(t * z[sel]) * b.phi(ch[sel] / np.sqrt(t))
        keep = val != 0
        self.phi_omega_stack = SparseStack(M, m[keep], i[keep], {"phi": val[keep]})
        A = np.bincount(i[keep], weights=val[keep] ** 2, minlength=self.npts) * self.directions.weight
        self.angular_energy = A.reshape(g.N, g.N)

    def _build_scales(self):
        g, b, M, lad = self.grid, self.bank, self.directions.M, self.ladder
        za = g.zeta_abs.reshape(-1)
        ang = g.zeta_angle.reshape(-1)
        A = self.angular_energy.reshape(-1)
        dw = self.directions.weight
        self.scales: list[ScaleBank] = []
        for k, (sig, c) in enumerate(zip(lad.sigmas, self.c_ladder)):
            ring = np.flatnonzero((za * sig >= b.Psi.lo) & (za * sig <= b.Psi.hi))
            Pr = b.Psi(za[ring] * sig)
            ring, Pr = ring[Pr > 0], Pr[Pr > 0]
            bound_psi = b.phi.hi * np.sqrt(sig)
            bound_phi = b.phi.hi * np.sqrt(np.minimum(4.0, b.Psi.hi / za[ring]))
            bound = np.zeros(self.npts)
            bound[ring] = np.maximum(bound_psi, bound_phi)
            m, i = direction_pairs(ang, bound, M)
            P = np.zeros(self.npts)
            P[ring] = Pr
            ch = chord(ang[i], m * dw)
            raw = c * b.phi(ch / np.sqrt(sig))
            if self.discrete:
                D = np.bincount(i, weights=raw**2, minlength=self.npts) * dw
                with np.errstate(divide="ignore", invalid="ignore"):
                    raw = np.where(raw > 0, raw / np.sqrt(D[i]), 0.0)
            psi = P[i] * raw
            phi_m = self.phi_omega_stack.lookup(m, i, "phi", self.npts)
            theta = P[i] * phi_m
            if np.any((theta != 0) & (A[i] < ANGULAR_FLOOR)):
                raise ValueError(f"angular energy below {ANGULAR_FLOOR} on supp theta at sigma={sig:g}")
            with np.errstate(divide="ignore", invalid="ignore"):
                chi = np.where(theta != 0, theta / A[i], 0.0)
            keep = (psi != 0) | (theta != 0)
            self.scales.append(ScaleBank(M, m[keep], i[keep],
                                         {"psi": psi[keep], "theta": theta[keep], "chi": chi[keep]},
                                         k=k, sigma=float(sig)))

    def _radial_r2(self, za):
        b, lad = self.bank, self.ladder
        if self.discrete:
            # sigma = 2^{-k/J} >= 1, k <= 0
            out = np.zeros(za.shape)
            kmin = int(np.floor(lad.J * np.log2(b.Psi.lo / max(za.max(), 1e-300)))) - 1
            for k in range(min(kmin, 0), 1):
                out += b.Psi(2.0 ** (-k / lad.J) * za) ** 2
            return out * lad.weight
        # continuum r^2 = int_1^inf Psi(sigma t)^2 dsigma/sigma by a fine log trapezoid
        n = 256
        lo = np.log(1.0)
        hi = np.log(max(b.Psi.hi / max(za[za > 0].min(), 1e-300), 1.0)) + 1e-12
        s = np.linspace(lo, hi, max(int(n * (hi - lo) / np.log(2)), 2) + 1)
        w = np.full(s.shape, s[1] - s[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        out = np.zeros(za.shape)
        for si, wi in zip(s, w):
            out += wi * b.Psi(np.exp(si) * za) ** 2
        return out

    def _build_radial(self):
        g, b = self.grid, self.bank
        za = g.zeta_abs
        r2 = self._radial_r2(za)
        r2[za == 0] = 1.0
        if np.any(r2 < -1e-10):
            raise ValueError("negative r^2: Calderon condition violated")
        self.r = np.sqrt(np.clip(r2, 0, None))
        tc = np.zeros(self.npts)
        dw, w = self.directions.weight, self.ladder.weight
        for sb in self.scales:
            tc += np.bincount(sb.index, weights=sb.values["theta"] * sb.values["chi"], minlength=self.npts)
        s = (1.0 - tc * dw * w).reshape(g.N, g.N)
        # s coincides with r^2 on the band, so its support is that of the sigma >= 1 tail
        mask = za < b.Psi.hi
        self.s_offsupport_residual = float(np.abs(s[~mask & (za <= self.band[1])]).max(initial=0.0))
        self.s = np.where(mask, s, 0.0)
        self.q = b.q(za)
        self.h = b.h(za)

    # -- accessors ------------------------------------------------------------

    def _mult(self, stack: SparseStack, m: int, key: str, name: str) -> Multiplier:
        sl = stack.slice(m)
        return Multiplier(self.grid, stack.index[sl], stack.values[key][sl], name=name)

    def psi(self, m: int, k: int) -> Multiplier:
        return self._mult(self.scales[k], m, "psi", f"psi[{m},{k}]")

    def theta(self, m: int, k: int) -> Multiplier:
        return self._mult(self.scales[k], m, "theta", f"theta[{m},{k}]")

    def chi(self, m: int, k: int) -> Multiplier:
        return self._mult(self.scales[k], m, "chi", f"chi[{m},{k}]")

    def phi_omega(self, m: int) -> Multiplier:
        return self._mult(self.phi_omega_stack, m, "phi", f"phi_omega[{m}]")

    def radial(self, name: str) -> Multiplier:
        return Multiplier.from_dense(self.grid, getattr(self, name), name=name)

    def coarse_symbol(self, which: str) -> np.ndarray:
        return {"W": self.r, "V": self.s, "U": self.h}[which]

    def channel_key(self, which: str) -> str:
        return {"W": "psi", "V": "theta", "U": "chi"}[which]

    @property
    def sigmas(self) -> np.ndarray:
        return self.ladder.sigmas

    def partition_residual(self) -> np.ndarray:
        """sum_k Psi(sigma_k |zeta|)^2 w + r^2 - 1 on the lattice."""
        za = self.grid.zeta_abs
        acc = self.r**2
        for sig in self.ladder.sigmas:
            acc = acc + self.bank.Psi(sig * za) ** 2 * self.ladder.weight
        return acc - 1.0

    def packet_sum(self, which: str = "W") -> np.ndarray:
        """Symbol of the reproducing operator, e.g. sum |psi|^2 w dw + r^2 for W*W."""
        key = self.channel_key(which)
        acc = np.zeros(self.npts)
        for sb in self.scales:
            v = sb.values[key]
            other = v if which == "W" else sb.values["theta"]
            acc += np.bincount(sb.index, weights=np.conj(v) * other if which == "W" else v * other,
                               minlength=self.npts).real
        acc = acc * self.directions.weight * self.ladder.weight
        acc = acc.reshape(self.grid.N, self.grid.N)
        if which == "W":
            return acc + self.r**2
        return acc + self.h * self.s

    # -- pointwise evaluation at arbitrary frequencies ------------------------

    def eval_phi_omega(self, nu: float, zabs: np.ndarray, zang: np.ndarray) -> np.ndarray:
        """phi_nu(zeta) for an arbitrary angle ``nu``, zeta given in polar form."""
        b = self.bank
        z = np.asarray(zabs, float)
        ch = chord(zang, nu)
        out = np.zeros(z.shape)
        if z.size == 0:
            return out
        zlo, zhi = z.min(), z.max()
        for t, w, c in zip(self.tau_nodes, self.tau_weights, self.c_tau):
            if t * zhi < b.Psi.lo or t * zlo > b.Psi.hi:
                continue
            sel = (t * z >= b.Psi.lo) & (t * z <= b.Psi.hi) & (ch < b.phi.hi * np.sqrt(t))
            if np.any(sel):
                out[sel] += w * c * b.Psi(t * z[sel]) * b.phi(ch[sel] / np.sqrt(t))
        return out

    def eval_theta(self, nu: float, k: int, zabs: np.ndarray, zang: np.ndarray) -> np.ndarray:
        return self.bank.Psi(self.ladder.sigmas[k] * zabs) * self.eval_phi_omega(nu, zabs, zang)

    def _neighbours(self, zang: np.ndarray, halfwidth: float) -> np.ndarray:
        dw = self.directions.weight
        if np.size(zang) == 0:
            return np.zeros(0, dtype=int)
        lo = int(np.floor((zang.min() - halfwidth) / dw))
        hi = int(np.ceil((zang.max() + halfwidth) / dw))
        return np.unique(np.mod(np.arange(lo, hi + 1), self.directions.M))

    def eval_angular_energy(self, zabs: np.ndarray, zang: np.ndarray) -> np.ndarray:
        """sum_m phi_{omega_m}(zeta)^2 2pi/M at arbitrary zeta (same quadrature as the table)."""
        dw = self.directions.weight
        half = 2 * np.arcsin(min(self.bank.phi.hi * 2.0 / 2, 1.0))  # tau <= 4
        out = np.zeros(np.shape(zabs))
        for mm in self._neighbours(zang, half):
            out += self.eval_phi_omega(mm * dw, zabs, zang) ** 2
        return out * dw

    def symbol_at(self, key: str, m: int, k: int, zabs: np.ndarray, zang: np.ndarray) -> np.ndarray:
        """psi / theta / chi for (omega_m, sigma_k) at arbitrary zeta in polar form.

        Agrees with the lattice banks on lattice points (same formulas and quadratures).
        """
        b = self.bank
        sig, c, dw = self.ladder.sigmas[k], self.c_ladder[k], self.directions.weight
        zabs, zang = np.asarray(zabs, float), np.asarray(zang, float)
        P = b.Psi(sig * zabs)
        if key == "psi":
            raw = c * b.phi(chord(zang, m * dw) / np.sqrt(sig))
            if self.discrete:
                D = np.zeros(zabs.shape)
                for mm in self._neighbours(zang, 2 * np.arcsin(min(b.phi.hi * np.sqrt(sig) / 2, 1))):
                    D += (c * b.phi(chord(zang, mm * dw) / np.sqrt(sig))) ** 2
                D *= dw
                raw = np.where(raw > 0, raw / np.sqrt(np.where(D > 0, D, 1.0)), 0.0)
            return P * raw
        th = P * self.eval_phi_omega(m * dw, zabs, zang)
        if key == "theta":
            return th
        if key == "chi":
            nz = th != 0
            out = np.zeros(th.shape)
            out[nz] = th[nz] / self.eval_angular_energy(zabs[nz], zang[nz])
            return out
        raise ValueError(f"unknown packet kind {key!r}")


def packet_change_ratio(family: PacketFamily, tilde: PacketFamily, m: int, nu: float, k: int,
                        floor: float = ANGULAR_FLOOR) -> tuple[Multiplier, float]:
    """eta = theta_{omega_m, sigma_k} / theta~_{nu, sigma_k} on supp theta, zero elsewhere.

    Returns the multiplier and min theta~ over the support.
    """
    family.grid.check_same(tilde.grid)
    _check_close(family, m, nu, k)
    th = family.theta(m, k)
    nz = th.values != 0
    idx, val = th.index[nz], th.values[nz]
    g = family.grid
    den = tilde.eval_theta(nu, k, g.zeta_abs.reshape(-1)[idx], g.zeta_angle.reshape(-1)[idx])
    dmin = float(den.min()) if den.size else np.inf
    if dmin < floor:
        raise ValueError(f"theta~ drops to {dmin:g} on supp theta")
    return Multiplier(g, idx, val / den, name=f"eta[{m},{nu:.4g},{k}]"), dmin


def _check_close(family, m, nu, k):
    sig = family.ladder.sigmas[k]
    if chord(m * family.directions.weight, nu) > np.sqrt(sig) / 16 + 1e-15:
        raise ValueError("directions must satisfy |omega - nu| <= sqrt(sigma)/16")


@dataclass
class DecayReport:
    sigma: float
    peak: float
    rho_bins: np.ndarray
    sup: np.ndarray
    slope: float
    l1_mass: float
    fit_range: tuple[float, float]


def kernel(m: Multiplier) -> np.ndarray:
    """Samples of F^{-1} m on the spatial grid, continuum normalization."""
    g = m.grid
    return g.N**2 / g.L**2 * np.fft.ifft2(m.dense())


def _binned_decay(K, rho, cell, sigma, fit_range, bins_per_decade) -> DecayReport:
    peak = float(K.max())
    top = np.log10(rho.max()) + 1e-9
    edges = np.concatenate([[0.0], np.logspace(-2, top, int(bins_per_decade * (top + 2)) + 1)])
    which = np.digitize(rho.ravel(), edges) - 1
    sup = np.zeros(len(edges) - 1)
    np.maximum.at(sup, which, K.ravel())
    centers = np.sqrt(edges[:-1] * edges[1:])
    centers[0] = 0.0
    sel = (centers >= fit_range[0]) & (centers <= fit_range[1]) & (sup > 1e-12 * peak)
    slope = float(np.polyfit(np.log1p(centers[sel]), np.log(sup[sel]), 1)[0]) if sel.sum() >= 3 else np.nan
    return DecayReport(float(sigma), peak, centers, sup, slope, float(K.sum() * cell), tuple(fit_range))


def packet_decay_profile(m: Multiplier, alpha: float, sigma: float, fit_range=(10.0, 1e3),
                         bins_per_decade: int = 8) -> DecayReport:
    """Bin |F^{-1} m| on the family grid by rho = |x|^2/sigma + <omega,x>^2/sigma^2.

    Reports the sup per bin, the peak, the l^1 mass and the least-squares slope of
    log sup against log(1 + rho) over ``fit_range`` (bins above 1e-12 of the peak).
    """
    g = m.grid
    K = np.abs(kernel(m))
    d1, d2 = g.displacement
    par = np.cos(alpha) * d1 + np.sin(alpha) * d2
    rho = (d1**2 + d2**2) / sigma + par**2 / sigma**2
    return _binned_decay(K, rho, g.dx**2, sigma, fit_range, bins_per_decade)


def zoom_window(alpha: float, sigma: float, n: int = 256, width_par: float = 1.0, width_perp: float = 1.2):
    """Rotated frequency window around sigma^{-1} omega in parabolic units.

    Returns (zabs, zang, h_par, h_perp): n x n polar samples of
    zeta = (1/sigma + a) omega + b omega_perp with a, b on centred uniform grids
    of widths width_par/sigma and width_perp/sqrt(sigma), in FFT order.
    """
    h_par, h_perp = width_par / sigma / n, width_perp / np.sqrt(sigma) / n
    a = np.fft.fftfreq(n, 1.0 / n) * h_par
    b = np.fft.fftfreq(n, 1.0 / n) * h_perp
    A, B = np.meshgrid(a, b, indexing="ij")
    u = 1 / sigma + A
    zabs = np.hypot(u, B)
    zang = np.mod(alpha + np.arctan2(B, u), 2 * np.pi)
    return zabs, zang, h_par, h_perp


def zoom_decay_profile(values: np.ndarray, sigma: float, h_par: float, h_perp: float,
                       fit_range=(1e3, 1e5), bins_per_decade: int = 8) -> DecayReport:
    """Decay report for a symbol sampled on a :func:`zoom_window`.

    |F^{-1} m| is unchanged by the frequency shift to the window centre, so the
    kernel modulus follows from one inverse FFT on the rotated grid.
    """
    n = values.shape[0]
    K = np.abs(np.fft.ifft2(values)) * n * n * h_par * h_perp / (2 * np.pi) ** 2
    s = 2 * np.pi * np.fft.fftfreq(n, d=h_par)
    t = 2 * np.pi * np.fft.fftfreq(n, d=h_perp)
    S, T = np.meshgrid(s, t, indexing="ij")
    rho = (S**2 + T**2) / sigma + S**2 / sigma**2
    cell = (2 * np.pi) ** 2 / (n * n * h_par * h_perp)
    return _binned_decay(K, rho, cell, sigma, fit_range, bins_per_decade)


def zoom_symbol(family: PacketFamily, key: str, m: int, k: int, n: int = 256,
                tilde: PacketFamily | None = None, nu: float | None = None):
    """Sample psi / theta / chi / eta for (omega_m, sigma_k) on a zoom window."""
    sig = family.ladder.sigmas[k]
    alpha = m * family.directions.weight
    zabs, zang, hp, hq = zoom_window(alpha, sig, n)
    if key == "eta":
        if tilde is None or nu is None:
            raise ValueError("eta needs the tilde family and nu")
        _check_close(family, m, nu, k)
        th = family.symbol_at("theta", m, k, zabs, zang)
        vals = np.zeros(th.shape)
        nz = th != 0
        den = tilde.eval_theta(nu, k, zabs[nz], zang[nz])
        if den.size and den.min() < ANGULAR_FLOOR:
            raise ValueError(f"theta~ drops to {den.min():g} on supp theta")
        vals[nz] = th[nz] / den
    else:
        vals = family.symbol_at(key, m, k, zabs, zang)
    return vals, sig, hp, hq
