"""Tent space functionals over S*(R^2): the conical functional A, the Carleson
functional C and T^p norms.

Averages over the anisotropic ball B_{lambda sqrt(sigma)}(x, omega) use the
comparable box by default: directions nu with |omega - nu| <= tau, and the
spatial rectangle with half widths min(tau^2, tau) along omega and tau across,
tau = lambda sqrt(sigma).  The spatial average is a multiplication of the
Fourier coefficients by sinc(a zeta_par) sinc(b zeta_perp); the angular average
is a circular moving mean over the direction grid.  The ``ball`` mode replaces
both by supersampled indicators of the metric ball, for calibration on small grids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .geometry import ball_volume, chord
from .grid import GridSpec, SpatialField, fft_workers
from .packets import PacketFamily
from .transforms import PacketCoefficients, coarse_field, iter_scale_energy

__all__ = [
    "TentConfig",
    "angular_halfwidth",
    "box_kernel_hat",
    "TentAccumulator",
    "KERNEL_CACHE",
    "A_functional",
    "A_functional_streaming",
    "tent_norm",
    "C_functional",
    "default_ball_list",
]


@dataclass(frozen=True)
class TentConfig:
    aperture: float = 1.0
    mode: str = "box"
    supersample: int = 4

    def __post_init__(self):
        if not self.aperture >= 1:
            raise ValueError("aperture must be >= 1")
        if self.mode not in ("box", "ball"):
            raise ValueError(f"unknown averaging mode {self.mode!r}")


def angular_halfwidth(M: int, radius: float) -> int:
    """Largest j with chord(2 pi j / M) <= radius, capped so 2j+1 <= M."""
    j = np.arange(M // 2 + 1)
    ok = chord(0.0, 2 * np.pi * j / M) <= radius + 1e-12
    h = int(j[ok].max())
    return min(h, (M - 1) // 2)


def _circular_mean(G: np.ndarray, h: int) -> np.ndarray:
    """Mean over the 2h+1 cyclic neighbours along axis 0."""
    M = G.shape[0]
    if 2 * h + 1 >= M:
        return np.broadcast_to(G.mean(axis=0), G.shape).copy()
    if h == 0:
        return G.copy()
    Gp = np.concatenate([G[M - h:], G, G[:h]])
    cs = np.cumsum(Gp, axis=0)
    out = cs[2 * h:].copy()
    out[1:] -= cs[: M - 1]
    return out / (2 * h + 1)


def _kernel_axes(N: int, L: float):
    z1 = 2 * np.pi / L * np.fft.fftfreq(N, d=1.0 / N)
    z2 = 2 * np.pi / L * np.fft.rfftfreq(N, d=1.0 / N)
    return z1[:, None], z2[None, :]


def _sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x, in place on x."""
    small = np.abs(x) < 1e-8
    x[small] = 1.0
    out = np.sin(x)
    out /= x
    out[small] = 1.0
    return out


def box_kernel_hat(grid: GridSpec | tuple[int, float], alphas: np.ndarray, a: float, b: float) -> np.ndarray:
    """rfft2-domain symbols of the normalized rectangles |y_par| <= a, |y_perp| <= b.

    ``grid`` may be a GridSpec or an (N, L) pair for a coarser lattice of the same period.
    """
    N, L = (grid.N, grid.L) if isinstance(grid, GridSpec) else grid
    z1, z2 = _kernel_axes(N, L)
    c, s = np.cos(alphas)[:, None, None], np.sin(alphas)[:, None, None]
    par = _sinc(a * (c * z1 + s * z2))
    par *= _sinc(b * (c * z2 - s * z1))
    return par


class _KernelCache:
    """Byte-bounded store of box kernels keyed by lattice, direction count and box."""

    def __init__(self, max_bytes: float = 6e8):
        self.max_bytes = max_bytes
        self.store: dict = {}
        self.nbytes = 0

    def get(self, N: int, L: float, alphas: np.ndarray, a: float, b: float) -> np.ndarray:
        key = (N, float(L), alphas.size, float(alphas[0]), float(a), float(b))
        hit = self.store.get(key)
        if hit is not None:
            return hit
        K = box_kernel_hat((N, L), alphas, a, b)
        if self.nbytes + K.nbytes <= self.max_bytes:
            self.store[key] = K
            self.nbytes += K.nbytes
        return K

    def clear(self):
        self.store.clear()
        self.nbytes = 0


KERNEL_CACHE = _KernelCache()


def _ball_kernels_hat(grid: GridSpec, M: int, alpha_m: float, tau: float, h: int, ss: int):
    """Supersampled metric-ball cross sections for one output direction.

    Returns rfft2 symbols (2h+1, N, N//2+1) of the spatial indicators at angle
    offsets -h..h and the total mass (for normalization).
    """
    N, dx = grid.N, grid.dx
    d1, d2 = grid.displacement
    sub = (np.arange(ss) + 0.5) / ss - 0.5
    out, mass = [], 0.0
    for dj in range(-h, h + 1):
        rem = tau**2 - chord(0.0, 2 * np.pi * dj / M) ** 2
        frac = np.zeros((N, N))
        if rem > 0:
            for u in sub:
                for v in sub:
                    y1, y2 = d1 + u * dx, d2 + v * dx
                    val = y1**2 + y2**2 + np.abs(np.cos(alpha_m) * y1 + np.sin(alpha_m) * y2)
                    frac += val <= rem
            frac /= ss * ss
        mass += frac.sum()
        out.append(sfft.rfft2(frac, workers=fft_workers()))
    return np.array(out), mass


def _embed_rows(Nk: int, N: int) -> np.ndarray:
    f = np.fft.fftfreq(Nk, d=1.0 / Nk).astype(int)
    return np.mod(f, N)


class TentAccumulator:
    """Builds A F(x, omega_m)^2 for several apertures from per-scale |F|^2 blocks.

    Averages are accumulated as rfft2 coefficients on the full lattice, so a
    scale whose energy lives on a coarser lattice only touches the matching
    low-frequency block.  ``result`` performs one inverse FFT per aperture.
    """

    def __init__(self, family: PacketFamily, apertures=(1.0,), mode: str = "box", supersample: int = 4):
        self.family = family
        self.configs = [TentConfig(float(l), mode, supersample) for l in apertures]
        g, M = family.grid, family.directions.M
        self.Ahat = {c.aperture: np.zeros((M, g.N, g.N // 2 + 1), dtype=complex) for c in self.configs}
        self.alphas = family.directions.angles

    @property
    def A2(self) -> dict[float, np.ndarray]:
        N = self.family.grid.N
        return {k: sfft.irfft2(v, s=(N, N), workers=fft_workers()) for k, v in self.Ahat.items()}

    def _add(self, lam: float, m0: int, m1: int, Nk: int, val: np.ndarray):
        N = self.family.grid.N
        if Nk == N:
            self.Ahat[lam][m0:m1] += val
        else:
            rows = _embed_rows(Nk, N)
            self.Ahat[lam][m0:m1, rows[:, None], np.arange(Nk // 2 + 1)[None, :]] += val

    def _box(self, lam: float, Ghat: np.ndarray, Nk: int, tau: float, weight: float):
        g, M = self.family.grid, self.family.directions.M
        a, b = min(tau**2, tau), tau
        if 2 * a < g.dx:
            raise ValueError(f"averaging box {2 * a:g} smaller than one grid cell {g.dx:g}")
        Gm = _circular_mean(Ghat, angular_halfwidth(M, tau))
        K = KERNEL_CACHE.get(Nk, g.L, self.alphas, a, b)
        Gm *= K
        Gm *= weight
        self._add(lam, 0, M, Nk, Gm)

    def _ball(self, lam: float, Ghat: np.ndarray, tau: float, ss: int, weight: float):
        g, M = self.family.grid, self.family.directions.M
        h = angular_halfwidth(M, tau)
        for m in range(M):
            K, mass = _ball_kernels_hat(g, M, self.alphas[m], tau, h, ss)
            rows = np.mod(m + np.arange(-h, h + 1), M)
            self.Ahat[lam][m] += weight / mass * np.sum(K * Ghat[rows], axis=0)

    def add_scale_hat(self, Ghat: np.ndarray, Nk: int, sigma: float, weight: float):
        """Ghat: rfft2 coefficients of |F(., ., sigma)|^2 on an Nk lattice, shape (M, Nk, Nk//2+1)."""
        for c in self.configs:
            tau = c.aperture * np.sqrt(sigma)
            if c.mode == "box":
                self._box(c.aperture, Ghat, Nk, tau, weight)
            else:
                if Nk != self.family.grid.N:
                    raise ValueError("ball averaging needs energies on the full lattice")
                self._ball(c.aperture, Ghat, tau, c.supersample, weight)

    def add_scale(self, G: np.ndarray, sigma: float, weight: float):
        """G = |F(., ., sigma)|^2 as an (M, N, N) array."""
        self.add_scale_hat(sfft.rfft2(G, workers=fft_workers()), self.family.grid.N, sigma, weight)

    def add_coarse(self, coarse: np.ndarray):
        """Coarse slot: omega-independent field, ball radius lambda, dsigma/sigma mass 1."""
        M = self.family.directions.M
        Gh = sfft.rfft2(np.abs(coarse) ** 2, workers=fft_workers())
        self.add_scale_hat(np.broadcast_to(Gh, (M,) + Gh.shape), self.family.grid.N, 1.0, 1.0)

    def result(self) -> dict[float, np.ndarray]:
        # sinc averaging of a sampled nonnegative field can dip below zero by roundoff-sized aliasing
        return {k: np.sqrt(np.maximum(v, 0.0)) for k, v in self.A2.items()}


def A_functional(F: PacketCoefficients, aperture: float = 1.0, mode: str = "box",
                 supersample: int = 4) -> np.ndarray:
    """A F sampled at (omega_m, x), shape (M, N, N)."""
    fam = F.family
    acc = TentAccumulator(fam, (aperture,), mode, supersample)
    for k, sig in enumerate(fam.ladder.sigmas):
        acc.add_scale(np.abs(F.coeff[:, k]) ** 2, sig, fam.ladder.weight)
    acc.add_coarse(F.coarse)
    return acc.result()[float(aperture)]


def A_functional_streaming(family: PacketFamily, f: SpatialField, which: str = "W",
                           apertures=(1.0,), mode: str = "box", extra=None) -> dict[float, np.ndarray]:
    """A (transform f) without materializing all channels.

    ``extra``, if given, is called as extra(k, Nk, Ghat) on each per-scale energy block.
    """
    acc = TentAccumulator(family, apertures, mode)
    for k, Nk, Ghat in iter_scale_energy(family, f, which, alias_free=(mode == "box")):
        if extra is not None:
            extra(k, Nk, Ghat)
        acc.add_scale_hat(Ghat, Nk, family.ladder.sigmas[k], family.ladder.weight)
    acc.add_coarse(coarse_field(family, f, which))
    return acc.result()


def tent_norm(A: np.ndarray, p: float, grid: GridSpec) -> float:
    """((2pi/M) dx^2 sum_{x,m} A^p)^{1/p}."""
    if not (np.isfinite(p) and p > 1):
        raise ValueError(f"exponent p must lie in (1, inf), got {p}")
    M = A.shape[0]
    return float((2 * np.pi / M * grid.dx**2 * np.sum(A**p)) ** (1 / p))


def default_ball_list(family: PacketFamily, stride: int | None = None, dir_stride: int | None = None):
    """Centres on a stride sub-lattice, radii 2^{-j/2} for j = 0..K/J."""
    g, M = family.grid, family.directions.M
    stride = stride or max(1, g.N // 16)
    dir_stride = dir_stride or max(1, M // 16)
    radii = [2.0 ** (-j / 2) for j in range(0, family.ladder.K // family.ladder.J + 1)]
    return dict(stride=stride, dir_stride=dir_stride, radii=radii)


def C_functional(F: PacketCoefficients, stride: int, dir_stride: int, radii) -> np.ndarray:
    """sup over listed balls B containing (x, omega_m) of (|B|^{-1} int_{T(B)} |F|^2)^{1/2}.

    Tents use the centre-distance criterion d(centre, q) <= tau - sqrt(sigma).
    Energies for all centres of one (direction, radius) pair come from one FFT
    correlation per scale and direction.
    """
    if len(radii) == 0:
        raise ValueError("empty ball list")
    fam = F.family
    g, M = fam.grid, fam.directions.M
    N, dx2, dw = g.N, g.dx**2, fam.directions.weight
    d1, d2 = g.displacement
    alphas = fam.directions.angles
    G = np.abs(F.coeff) ** 2  # (M, K, N, N)
    Ghat = sfft.rfft2(G, workers=fft_workers())
    Gc_hat = sfft.rfft2(np.abs(F.coarse) ** 2, workers=fft_workers())
    sig = fam.ladder.sigmas
    C2 = np.zeros((M, N, N))
    xs = np.arange(0, N, stride)
    for mc in range(0, M, dir_stride):
        ac = alphas[mc]
        par = np.abs(np.cos(ac) * d1 + np.sin(ac) * d2)
        sp = d1**2 + d2**2 + par
        ang = chord(ac, alphas) ** 2  # (M,)
        for tau in radii:
            E = np.zeros((N, N))
            for k in range(fam.ladder.K):
                rad = tau - np.sqrt(sig[k])
                if rad <= 0:
                    continue
                for nu in np.flatnonzero(ang <= rad**2):
                    mask = (sp + ang[nu] <= rad**2).astype(float)
                    # correlation: E(x) = sum_y mask(y) G(x + y)
                    E += fam.ladder.weight * dw * dx2 * sfft.irfft2(
                        np.conj(sfft.rfft2(mask)) * Ghat[nu, k], s=(N, N))
            if tau > 1:
                rad = tau - 1.0
                for nu in np.flatnonzero(ang <= rad**2):
                    mask = (sp + ang[nu] <= rad**2).astype(float)
                    E += dw * dx2 * sfft.irfft2(np.conj(sfft.rfft2(mask)) * Gc_hat, s=(N, N))
            val = np.maximum(E, 0) / ball_volume(float(tau))
            members = (sp[None] + ang[:, None, None] <= tau**2)  # (M, N, N) ball at origin
            for i in xs:
                for j in xs:
                    sh = np.roll(members, (i, j), axis=(1, 2))
                    np.maximum(C2, np.where(sh, val[i, j], 0.0), out=C2)
    return np.sqrt(C2)
