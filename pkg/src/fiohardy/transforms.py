"""Wave packet transforms W, V, U, their adjoints and the half-wave propagator.

Coefficients live on (x, omega_m, sigma_k) plus one coarse field for the slot
sigma in [1, e].  The discrete inner product is

    <F, G> = sum_{m,k} (2pi/M) w_k dx^2 sum_x F conj(G) + 2pi dx^2 sum_x F_c conj(G_c),

the factor 2pi on the coarse term being the omega-integral of an
omega-independent field.  The coarse slot stores (2pi)^{-1/2} a(D) f with a = r, s, h.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.fft as sfft

from .grid import SpatialField, fft_workers
from .packets import PacketFamily

__all__ = [
    "PacketCoefficients",
    "iter_channels",
    "iter_scale_energy",
    "channel_grid_size",
    "energy_grid_size",
    "transform",
    "transform_W",
    "transform_V",
    "transform_U",
    "adjoint",
    "adjoint_W",
    "adjoint_U",
    "inner",
    "coefficient_norm",
    "streaming_norm",
    "reproduce",
    "half_wave",
    "half_wave_symbol",
    "MATERIALIZE_LIMIT",
]

SQRT2PI = np.sqrt(2 * np.pi)
MATERIALIZE_LIMIT = 1.5e9  # bytes
_CHANNEL_KEY = {"W": "psi", "V": "theta", "U": "chi"}


@dataclass
class PacketCoefficients:
    """Transform output: coeff[m, k] spatial fields plus the coarse field."""

    family: PacketFamily
    which: str
    coeff: np.ndarray  # (M, K, N, N) complex
    coarse: np.ndarray  # (N, N) complex

    def __post_init__(self):
        fam = self.family
        shape = (fam.directions.M, fam.ladder.K, fam.grid.N, fam.grid.N)
        if self.coeff.shape != shape:
            raise ValueError(f"coefficient shape {self.coeff.shape} != {shape}")
        if self.coarse.shape != shape[2:]:
            raise ValueError("coarse field shape mismatch")

    def __add__(self, other):
        _check_family(self.family, other.family)
        return PacketCoefficients(self.family, self.which, self.coeff + other.coeff, self.coarse + other.coarse)

    def __mul__(self, alpha):
        return PacketCoefficients(self.family, self.which, alpha * self.coeff, alpha * self.coarse)

    __rmul__ = __mul__

    def channel(self, m: int, k: int) -> SpatialField:
        return SpatialField(self.family.grid, self.coeff[m, k])

    def scale_block(self, k: int) -> np.ndarray:
        return self.coeff[:, k]


def _check_family(a: PacketFamily, b: PacketFamily):
    if a is not b:
        raise ValueError("coefficients belong to a different packet family")


def _block_size(family: PacketFamily) -> int:
    return int(max(1, min(family.directions.M, 2**22 // family.grid.N**2)))


def _fhat(family: PacketFamily, f: SpatialField) -> np.ndarray:
    family.grid.check_same(f.grid)
    return sfft.fft2(f.data, workers=fft_workers()).reshape(-1)


def channel_grid_size(index: np.ndarray, N: int) -> int:
    """Smallest power of two holding integer frequencies in [-f, f]^2 (f <= Nk/2 - 1), capped at N."""
    if index.size == 0:
        return 8
    f1, f2 = _signed(index, N)
    fmax = int(max(np.abs(f1).max(), np.abs(f2).max()))
    Nk = 8
    while Nk < 2 * fmax + 2:
        Nk *= 2
    return min(Nk, N)


def iter_channels(family: PacketFamily, f: SpatialField, which: str = "W",
                  block: int | None = None, reduced: bool = False) -> Iterator[tuple[int, int, np.ndarray]]:
    """Stream channels scale by scale: yields (k, m0, array of shape (m1-m0, Nk, Nk)).

    Nk = N unless ``reduced``, in which case each scale is sampled on the
    smallest lattice holding its frequency support.  The samples are exact
    values of the channel at the coarser points.
    """
    key = _CHANNEL_KEY[which]
    N, M = family.grid.N, family.directions.M
    fhat = _fhat(family, f)
    for k, sb in enumerate(family.scales):
        Nk = channel_grid_size(sb.index, N) if reduced else N
        sidx = _small_index(sb.index, N, Nk)
        vals = sb.values[key] * fhat[sb.index] * (Nk / N) ** 2
        blk = block or int(max(1, min(M, 2**22 // Nk**2)))
        for m0 in range(0, M, blk):
            m1 = min(M, m0 + blk)
            sl = slice(sb.offsets[m0], sb.offsets[m1])
            out = np.zeros((m1 - m0, Nk * Nk), dtype=complex)
            out[sb.owner[sl] - m0, sidx[sl]] = vals[sl]
            rows = np.unique(sb.owner[sl] - m0)
            out = out.reshape(m1 - m0, Nk, Nk)
            if rows.size:
                out[rows] = sfft.ifft2(out[rows], workers=fft_workers())
            yield k, m0, out


def _signed(index: np.ndarray, N: int) -> tuple[np.ndarray, np.ndarray]:
    i1, i2 = np.divmod(index, N)
    return np.where(i1 < N // 2, i1, i1 - N), np.where(i2 < N // 2, i2, i2 - N)


def _small_index(index: np.ndarray, N: int, Nk: int) -> np.ndarray:
    if Nk == N:
        return index
    f1, f2 = _signed(index, N)
    return np.mod(f1, Nk) * Nk + np.mod(f2, Nk)


def energy_grid_size(index: np.ndarray, N: int) -> int:
    """Smallest power of two carrying |F|^2 without aliasing, capped at N.

    A channel with integer frequencies in [-f, f]^2 has |F|^2 with frequencies
    in [-2f, 2f]^2, which needs 2f <= Nk/2 - 1.
    """
    if index.size == 0:
        return 8
    f1, f2 = _signed(index, N)
    fmax = int(max(np.abs(f1).max(), np.abs(f2).max()))
    Nk = 8
    while Nk < 4 * fmax + 2:
        Nk *= 2
    return min(Nk, N)


def iter_scale_energy(family: PacketFamily, f: SpatialField, which: str = "W",
                      alias_free: bool = True) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield (k, Nk, Ghat): rfft2 coefficients of |F(., omega_m, sigma_k)|^2.

    Ghat has shape (M, Nk, Nk//2+1) and holds the full-grid rfft2 coefficients
    at the integer frequencies representable on Nk points.  When Nk < N every
    other full-grid coefficient is exactly zero, since |F|^2 is a trigonometric
    polynomial whose frequencies lie in the difference set of the channel support.
    """
    key = _CHANNEL_KEY[which]
    N, M = family.grid.N, family.directions.M
    fhat = _fhat(family, f)
    for k, sb in enumerate(family.scales):
        Nk = energy_grid_size(sb.index, N) if alias_free else N
        sidx = _small_index(sb.index, N, Nk)
        vals = sb.values[key] * fhat[sb.index]
        Ghat = np.zeros((M, Nk, Nk // 2 + 1), dtype=complex)
        block = int(max(1, min(M, 2**22 // Nk**2)))
        for m0 in range(0, M, block):
            m1 = min(M, m0 + block)
            sl = slice(sb.offsets[m0], sb.offsets[m1])
            rows = np.unique(sb.owner[sl] - m0)
            if rows.size == 0:
                continue
            out = np.zeros((m1 - m0, Nk * Nk), dtype=complex)
            out[sb.owner[sl] - m0, sidx[sl]] = vals[sl]
            F = sfft.ifft2(out.reshape(m1 - m0, Nk, Nk)[rows], workers=fft_workers())
            G = F.real**2 + F.imag**2
            Ghat[m0 + rows] = sfft.rfft2(G, workers=fft_workers()) * (Nk / N) ** 2
        yield k, Nk, Ghat


def coarse_field(family: PacketFamily, f: SpatialField, which: str = "W") -> np.ndarray:
    fhat = _fhat(family, f).reshape(family.grid.N, family.grid.N)
    return sfft.ifft2(family.coarse_symbol(which) * fhat, workers=fft_workers()) / SQRT2PI


def transform(family: PacketFamily, f: SpatialField, which: str = "W") -> PacketCoefficients:
    """Materialized transform; refuses grids whose coefficients exceed MATERIALIZE_LIMIT."""
    M, K, N = family.directions.M, family.ladder.K, family.grid.N
    nbytes = 16.0 * M * K * N * N
    if nbytes > MATERIALIZE_LIMIT:
        raise MemoryError(f"{nbytes / 1e9:.1f} GB of coefficients; use the streaming routines")
    coeff = np.zeros((M, K, N, N), dtype=complex)
    for k, m0, blk in iter_channels(family, f, which):
        coeff[m0:m0 + blk.shape[0], k] = blk
    return PacketCoefficients(family, which, coeff, coarse_field(family, f, which))


def transform_W(family, f):
    return transform(family, f, "W")


def transform_V(family, f):
    return transform(family, f, "V")


def transform_U(family, f):
    return transform(family, f, "U")


class _AdjointAccumulator:
    """Accumulates sum_{m,k} dw w conj(m_{mk}) F_{mk}^ in the spectral domain."""

    def __init__(self, family: PacketFamily, which: str):
        self.family, self.key = family, _CHANNEL_KEY[which]
        self.which = which
        n2 = family.grid.N ** 2
        self.re = np.zeros(n2)
        self.im = np.zeros(n2)

    def add(self, k: int, m0: int, blk: np.ndarray):
        """Add channels m0.. of scale k; blk has shape (mb, Nk, Nk) for any Nk holding the support."""
        fam = self.family
        sb = fam.scales[k]
        N, Nk = fam.grid.N, blk.shape[-1]
        m1 = m0 + blk.shape[0]
        sl = slice(sb.offsets[m0], sb.offsets[m1])
        if sl.start == sl.stop:
            return
        rows = np.unique(sb.owner[sl] - m0)
        spec = np.zeros(blk.shape, dtype=complex)
        spec[rows] = sfft.fft2(blk[rows], workers=fft_workers())
        spec = spec.reshape(blk.shape[0], -1) * (N / Nk) ** 2
        sidx = _small_index(sb.index[sl], N, Nk)
        v = np.conj(sb.values[self.key][sl]) * spec[sb.owner[sl] - m0, sidx]
        n2 = self.re.size
        self.re += np.bincount(sb.index[sl], weights=v.real, minlength=n2)
        self.im += np.bincount(sb.index[sl], weights=v.imag, minlength=n2)

    def finish(self, coarse: np.ndarray) -> SpatialField:
        fam = self.family
        N = fam.grid.N
        acc = (self.re + 1j * self.im).reshape(N, N) * fam.directions.weight * fam.ladder.weight
        cs = sfft.fft2(coarse, workers=fft_workers())
        acc = acc + SQRT2PI * np.conj(fam.coarse_symbol(self.which)) * cs
        return SpatialField(fam.grid, sfft.ifft2(acc, workers=fft_workers()))


def adjoint(F: PacketCoefficients, which: str | None = None) -> SpatialField:
    """Adjoint of the transform ``which`` (default: the one that produced F)."""
    which = which or F.which
    acc = _AdjointAccumulator(F.family, which)
    block = _block_size(F.family)
    M = F.family.directions.M
    for k in range(F.family.ladder.K):
        for m0 in range(0, M, block):
            acc.add(k, m0, F.coeff[m0:min(M, m0 + block), k])
    return acc.finish(F.coarse)


def adjoint_W(F):
    return adjoint(F, "W")


def adjoint_U(F):
    return adjoint(F, "U")


def reproduce(family: PacketFamily, f: SpatialField, forward: str = "W", backward: str = "W",
              reduced: bool = True) -> SpatialField:
    """Streaming evaluation of backward* forward f (W*W or U*V) without storing all channels.

    ``reduced`` samples each scale on its smallest exact lattice (see iter_channels).
    """
    acc = _AdjointAccumulator(family, backward)
    for k, m0, blk in iter_channels(family, f, forward, reduced=reduced):
        acc.add(k, m0, blk)
    return acc.finish(coarse_field(family, f, forward))


def inner(F: PacketCoefficients, G: PacketCoefficients) -> complex:
    _check_family(F.family, G.family)
    fam = F.family
    dx2 = fam.grid.dx**2
    main = np.vdot(G.coeff, F.coeff) * fam.directions.weight * fam.ladder.weight * dx2
    return complex(main + 2 * np.pi * dx2 * np.vdot(G.coarse, F.coarse))


def coefficient_norm(F: PacketCoefficients) -> float:
    return float(np.sqrt(inner(F, F).real))


def streaming_norm(family: PacketFamily, f: SpatialField, which: str = "W") -> float:
    """Discrete L^2(S*_+) norm of the transform, channel by channel."""
    dx2 = family.grid.dx**2
    tot = 0.0
    for _, _, blk in iter_channels(family, f, which):
        tot += float(np.sum(np.abs(blk) ** 2))
    tot *= family.directions.weight * family.ladder.weight * dx2
    c = coarse_field(family, f, which)
    tot += 2 * np.pi * dx2 * float(np.sum(np.abs(c) ** 2))
    return float(np.sqrt(tot))


def half_wave_symbol(grid, t: float) -> np.ndarray:
    return np.exp(1j * t * grid.zeta_abs)


def half_wave(f: SpatialField, t: float) -> SpatialField:
    """e^{it sqrt(-Laplacian)} f, spectral multiplication by e^{it|zeta|}."""
    g = f.grid
    out = sfft.ifft2(half_wave_symbol(g, t) * sfft.fft2(f.data, workers=fft_workers()), workers=fft_workers())
    return SpatialField(g, out)
