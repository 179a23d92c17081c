"""Deterministic test functions, band-limited and normalized to unit L^2.

Every member is defined by its Fourier transform on the frequency lattice, so
the same member on a finer grid with the same period is the same torus function.
Frequencies scale with ``zeta_max / 64``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, SpatialField, l2_norm, to_spatial, SpectralField
from .profiles import bump, plateau

__all__ = ["TestFunction", "generate_suite", "SUITE_TAGS", "make_function"]

SUITE_TAGS = ("gaussian", "modulated_packet", "focused_annulus", "random_bandlimited", "directional_packet")


@dataclass
class TestFunction:
    id: str
    tag: str
    params: dict
    field: SpatialField = field(repr=False)


def _finish(grid: GridSpec, fhat: np.ndarray, zeta_max: float) -> SpatialField:
    fhat = np.where(grid.zeta_abs <= zeta_max, fhat, 0.0)
    f = to_spatial(SpectralField(grid, fhat))
    n = l2_norm(f)
    if not n > 0:
        raise ValueError("test function vanishes on the resolved band")
    return SpatialField(grid, f.data / n)


def _random_coeffs(grid: GridSpec, seed: int, zeta_max: float) -> np.ndarray:
    """Seeded coefficients on integer frequencies |k| <= ceil(zeta_max L / 2pi), independent of N."""
    kmax = int(np.ceil(zeta_max * grid.L / (2 * np.pi)))
    rng = np.random.default_rng(seed)
    side = 2 * kmax + 1
    c = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    out = np.zeros((grid.N, grid.N), dtype=complex)
    ks = np.arange(-kmax, kmax + 1)
    if side > grid.N:
        raise ValueError("band exceeds the grid")
    ii = np.mod(ks, grid.N)
    out[np.ix_(ii, ii)] = c
    return out


def make_function(grid: GridSpec, tag: str, zeta_max: float, **params) -> SpatialField:
    z1, z2 = grid.zeta
    za = grid.zeta_abs
    if tag == "gaussian":
        a = params.get("width", 8.0 / zeta_max)
        return _finish(grid, np.exp(-0.5 * (a * za) ** 2), zeta_max)
    if tag == "modulated_packet":
        k0, ang = params["zeta0"], params.get("angle", 0.3)
        a = params.get("width", 0.6)
        d1, d2 = z1 - k0 * np.cos(ang), z2 - k0 * np.sin(ang)
        return _finish(grid, np.exp(-0.5 * a * a * (d1**2 + d2**2)), zeta_max)
    if tag == "focused_annulus":
        R, hw = params["R"], params.get("halfwidth", 3.0)
        prof = bump(R - hw, R + hw)
        return _finish(grid, prof(za) * np.exp(-1j * za), zeta_max)
    if tag == "random_bandlimited":
        lo, hi = params["band"]
        c = _random_coeffs(grid, params["seed"], zeta_max)
        return _finish(grid, c * ((za >= lo) & (za <= hi)), zeta_max)
    if tag == "directional_packet":
        s0, a0 = params.get("sigma0", 1 / 8), params.get("angle", 0.7)
        ang = np.arctan2(z2, z1)
        ch = 2 * np.abs(np.sin((ang - a0) / 2))
        fhat = bump(0.6, 1.6)(s0 * za) * plateau(0.25, 0.5)(ch / np.sqrt(s0))
        return _finish(grid, fhat, zeta_max)
    raise ValueError(f"unknown test function tag {tag!r}")


def generate_suite(grid: GridSpec, selection: str | list[str] = "default",
                   zeta_max: float | None = None) -> list[TestFunction]:
    """The default suite: gaussian, two modulated packets, two focused annuli,
    three random band-limited fields and one directional packet."""
    zeta_max = grid.resolved_band[1] if zeta_max is None else zeta_max
    sc = zeta_max / 64
    specs = [
        ("gaussian", "gaussian", {}),
        ("modulated_16", "modulated_packet", {"zeta0": 16 * sc}),
        ("modulated_48", "modulated_packet", {"zeta0": 48 * sc}),
        ("annulus_24", "focused_annulus", {"R": 24 * sc, "halfwidth": 3.0 * max(sc, 0.5)}),
        ("annulus_56", "focused_annulus", {"R": 56 * sc, "halfwidth": 3.0 * max(sc, 0.5)}),
        ("random_1", "random_bandlimited", {"seed": 1, "band": (zeta_max / 16, 7 * zeta_max / 8)}),
        ("random_2", "random_bandlimited", {"seed": 2, "band": (zeta_max / 16, 7 * zeta_max / 8)}),
        ("random_3", "random_bandlimited", {"seed": 3, "band": (zeta_max / 16, 7 * zeta_max / 8)}),
        ("directional", "directional_packet", {"sigma0": 1 / 8, "angle": 0.7}),
    ]
    if selection == "default":
        chosen = specs
    else:
        sel = [selection] if isinstance(selection, str) else list(selection)
        chosen = [s for s in specs if s[0] in sel or s[1] in sel]
    if not chosen:
        raise ValueError(f"empty suite for selection {selection!r}")
    out = []
    for tid, tag, params in chosen:
        out.append(TestFunction(tid, tag, params, make_function(grid, tag, zeta_max, **params)))
    return out
