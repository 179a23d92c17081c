"""Periodic grid on R^2, FFT conventions, Fourier multipliers and L^p norms.

The continuum Fourier transform is ``F f(xi) = int e^{-i x.xi} f(x) dx``.  On the
torus of period ``L`` sampled with ``N`` points per axis this becomes
``fhat = dx**2 * fft2(f)`` on the lattice ``2 pi k / L``, so that
``||f||_2 = (2 pi)^{-1} ||fhat||_2`` with the natural quadrature weights.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "GridSpec",
    "SpatialField",
    "SpectralField",
    "Multiplier",
    "fft_workers",
    "to_spectral",
    "to_spatial",
    "apply_multiplier",
    "lp_norm",
    "l2_norm",
]


def fft_workers() -> int:
    """Worker count for scipy.fft, taken from ``FIOHARDY_THREADS``."""
    try:
        return max(1, int(os.environ.get("FIOHARDY_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    """Square periodic grid of ``N x N`` samples on a torus of side ``L``."""

    N: int
    L: float = 2 * np.pi
    n: int = 2

    def __post_init__(self):
        if self.n != 2:
            raise ValueError("only n = 2 is supported")
        if self.N < 32 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 32, got {self.N}")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dzeta(self) -> float:
        return 2 * np.pi / self.L

    @property
    def nyquist(self) -> float:
        return np.pi * self.N / self.L

    @property
    def resolved_band(self) -> tuple[float, float]:
        # upper end keeps a factor 2 of headroom below Nyquist
        return (0.5, self.nyquist / 2)

    @cached_property
    def freq_axis(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @cached_property
    def zeta(self) -> tuple[np.ndarray, np.ndarray]:
        """Lattice frequencies ``(zeta_1, zeta_2)`` in FFT order, shape (N, N)."""
        return tuple(np.meshgrid(self.freq_axis, self.freq_axis, indexing="ij"))

    @cached_property
    def zeta_abs(self) -> np.ndarray:
        z1, z2 = self.zeta
        return np.hypot(z1, z2)

    @cached_property
    def zeta_angle(self) -> np.ndarray:
        z1, z2 = self.zeta
        return np.mod(np.arctan2(z2, z1), 2 * np.pi)

    @cached_property
    def x_axis(self) -> np.ndarray:
        return self.dx * np.arange(self.N)

    @cached_property
    def x(self) -> tuple[np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.x_axis, self.x_axis, indexing="ij"))

    @cached_property
    def displacement(self) -> tuple[np.ndarray, np.ndarray]:
        """Shortest torus displacement of each grid point from the origin."""
        d = self.x_axis.copy()
        d[d >= self.L / 2] -= self.L
        return tuple(np.meshgrid(d, d, indexing="ij"))

    def check_same(self, other: "GridSpec"):
        if self != other:
            raise ValueError(f"grid mismatch: {self} vs {other}")


@dataclass
class SpatialField:
    grid: GridSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.grid.N, self.grid.N):
            raise ValueError(f"data shape {self.data.shape} does not match grid N={self.grid.N}")

    def __add__(self, other):
        self.grid.check_same(other.grid)
        return SpatialField(self.grid, self.data + other.data)

    def __mul__(self, alpha):
        return SpatialField(self.grid, alpha * self.data)

    __rmul__ = __mul__


@dataclass
class SpectralField:
    grid: GridSpec
    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.shape != (self.grid.N, self.grid.N):
            raise ValueError(f"data shape {self.data.shape} does not match grid N={self.grid.N}")


@dataclass
class Multiplier:
    """Fourier multiplier stored sparsely by flat lattice index.

    ``values`` is exactly zero off ``index``; a dense view is built on demand.
    """

    grid: GridSpec
    index: np.ndarray
    values: np.ndarray
    name: str = ""
    _dense: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.index = np.asarray(self.index, dtype=np.int64)
        self.values = np.asarray(self.values)
        if self.index.shape != self.values.shape:
            raise ValueError("index and values must have equal length")

    @classmethod
    def from_dense(cls, grid: GridSpec, data, name: str = "") -> "Multiplier":
        data = np.asarray(data)
        flat = data.reshape(-1)
        idx = np.flatnonzero(flat)
        return cls(grid, idx, flat[idx].copy(), name=name)

    @property
    def support_mask(self) -> np.ndarray:
        mask = np.zeros(self.grid.N * self.grid.N, dtype=bool)
        mask[self.index] = True
        return mask.reshape(self.grid.N, self.grid.N)

    def dense(self) -> np.ndarray:
        if self._dense is None:
            out = np.zeros(self.grid.N * self.grid.N, dtype=np.result_type(self.values, float))
            out[self.index] = self.values
            self._dense = out.reshape(self.grid.N, self.grid.N)
        return self._dense

    def conj(self) -> "Multiplier":
        return Multiplier(self.grid, self.index, np.conj(self.values), name=self.name)

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        self.grid.check_same(other.grid)
        return Multiplier.from_dense(self.grid, self.dense() * other.dense())


def to_spectral(f: SpatialField) -> SpectralField:
    g = f.grid
    return SpectralField(g, g.dx**2 * sfft.fft2(f.data, workers=fft_workers()))


def to_spatial(fhat: SpectralField) -> SpatialField:
    g = fhat.grid
    return SpatialField(g, sfft.ifft2(fhat.data, workers=fft_workers()) / g.dx**2)


def apply_multiplier(m: Multiplier, f: SpatialField) -> SpatialField:
    """Return ``F^{-1}(m * F f)``."""
    m.grid.check_same(f.grid)
    fhat = sfft.fft2(f.data, workers=fft_workers()).reshape(-1)
    out = np.zeros_like(fhat)
    out[m.index] = m.values * fhat[m.index]
    out = sfft.ifft2(out.reshape(f.data.shape), workers=fft_workers())
    return SpatialField(f.grid, out)


def _check_p(p: float):
    if not (np.isfinite(p) and p > 1):
        raise ValueError(f"exponent p must lie in (1, inf), got {p}")


def lp_norm(f: SpatialField | np.ndarray, p: float, grid: GridSpec | None = None) -> float:
    """``((L/N)^2 sum_x |f(x)|^p)^(1/p)``."""
    _check_p(p)
    if isinstance(f, SpatialField):
        grid, data = f.grid, f.data
    else:
        data = f
    return float((grid.dx**2 * np.sum(np.abs(data) ** p)) ** (1 / p))


def l2_norm(f: SpatialField) -> float:
    return float(np.sqrt(f.grid.dx**2 * np.sum(np.abs(f.data) ** 2)))
