"""Geometry of the cosphere bundle R^2 x S^1: the anisotropic metric, balls,
tents, ball and slab volumes, and the direction / scale quadratures."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "CospherePoint",
    "AnisotropicBall",
    "DirectionSet",
    "ScaleLadder",
    "chord",
    "torus_displacement",
    "metric_d",
    "metric_d_arrays",
    "ball_membership",
    "box_ball_membership",
    "tent_membership",
    "tent_membership_sampled",
    "level_set_area",
    "ball_volume",
    "ball_volume_mc",
    "slab_volume",
    "slab_volume_exact",
    "fit_slope",
]


@dataclass(frozen=True)
class CospherePoint:
    x: tuple[float, float]
    alpha: float  # angle of omega, stored mod 2 pi

    def __post_init__(self):
        object.__setattr__(self, "x", (float(self.x[0]), float(self.x[1])))
        object.__setattr__(self, "alpha", float(np.mod(self.alpha, 2 * np.pi)))

    @property
    def omega(self) -> np.ndarray:
        return np.array([np.cos(self.alpha), np.sin(self.alpha)])


@dataclass(frozen=True)
class AnisotropicBall:
    center: CospherePoint
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("ball radius must be positive")


@dataclass(frozen=True)
class DirectionSet:
    """Uniform angles 2 pi m / M with quadrature weight 2 pi / M."""

    M: int

    def __post_init__(self):
        if self.M < 4:
            raise ValueError("need at least 4 directions")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.M) / self.M

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.M

    @property
    def vectors(self) -> np.ndarray:
        a = self.angles
        return np.stack([np.cos(a), np.sin(a)], axis=1)

    def check_resolves(self, sigma_min: float):
        need = int(np.ceil(2 * np.pi / np.sqrt(sigma_min)))
        if self.M < need:
            raise ValueError(f"M >= ceil(2 pi / sqrt(sigma_min)) = {need} violated (M={self.M})")


@dataclass(frozen=True)
class ScaleLadder:
    """sigma_k = 2^{-k/J}, k = 1..K, each with dsigma/sigma weight ln2/J.

    The slot sigma in [1, e] is kept separately with weight 1.
    """

    J: int
    K: int

    def __post_init__(self):
        if self.J < 1 or self.K < 1:
            raise ValueError("J and K must be positive")

    @classmethod
    def from_sigma_min(cls, J: int, sigma_min: float) -> "ScaleLadder":
        K = J * np.log2(1 / sigma_min)
        if abs(K - round(K)) > 1e-9:
            raise ValueError(f"sigma_min={sigma_min} is not on the 2^(-k/{J}) ladder")
        return cls(J, int(round(K)))

    @property
    def sigmas(self) -> np.ndarray:
        return 2.0 ** (-np.arange(1, self.K + 1) / self.J)

    @property
    def sigma_min(self) -> float:
        return 2.0 ** (-self.K / self.J)

    @property
    def weight(self) -> float:
        return np.log(2) / self.J

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.K, self.weight)

    coarse_weight: float = 1.0

    def band_top(self, psi_lo: float = 0.8) -> float:
        """Largest |zeta| for which no ladder node beyond K touches the Psi support."""
        return psi_lo * 2.0 ** ((self.K + 1) / self.J)


def chord(a, b):
    """|omega - nu| for unit vectors at angles a, b."""
    return 2 * np.abs(np.sin((np.asarray(a) - np.asarray(b)) / 2))


def torus_displacement(dx, L: float | None):
    """Shortest representative of dx modulo L (identity if L is None)."""
    dx = np.asarray(dx, dtype=float)
    if L is None:
        return dx
    return dx - L * np.round(dx / L)


def metric_d_arrays(x1, x2, a, y1, y2, b, L: float | None = None):
    """Vectorized (|x-y|^2 + |<omega, x-y>| + |omega-nu|^2)^{1/2}; omega from the first point."""
    d1 = torus_displacement(np.asarray(x1) - np.asarray(y1), L)
    d2 = torus_displacement(np.asarray(x2) - np.asarray(y2), L)
    par = np.cos(a) * d1 + np.sin(a) * d2
    return np.sqrt(d1**2 + d2**2 + np.abs(par) + chord(a, b) ** 2)


def metric_d(p: CospherePoint, q: CospherePoint, L: float | None = None) -> float:
    return float(metric_d_arrays(p.x[0], p.x[1], p.alpha, q.x[0], q.x[1], q.alpha, L))


def ball_membership(B: AnisotropicBall, q: CospherePoint, L: float | None = None) -> bool:
    return metric_d(B.center, q, L) <= B.tau


def box_ball_membership(B: AnisotropicBall, q: CospherePoint, L: float | None = None) -> bool:
    c = B.center
    d = torus_displacement(np.subtract(c.x, q.x), L)
    par = abs(c.omega @ d)
    return bool(np.hypot(*d) <= B.tau and par <= B.tau**2 and chord(c.alpha, q.alpha) <= B.tau)


def tent_membership(B: AnisotropicBall, q: CospherePoint, sigma: float, c_geo: float = 1.0,
                    L: float | None = None) -> bool:
    """Center-distance criterion: d(center, q) <= tau - c_geo sqrt(sigma)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return metric_d(B.center, q, L) <= B.tau - c_geo * np.sqrt(sigma)


def tent_membership_sampled(B: AnisotropicBall, q: CospherePoint, sigma: float, probes: int = 256,
                            rng: np.random.Generator | None = None) -> bool:
    """Reference tent test: q in B and d(q, z) >= sqrt(sigma) for probes z just outside B.

    Probes are drawn on the sphere d(center, z) = tau (1 + 1e-9): random angle offset,
    random spatial direction, with the spatial radius solved from the level equation.
    """
    if not ball_membership(B, q):
        return False
    rng = np.random.default_rng(0) if rng is None else rng
    c = B.center
    target = (B.tau * (1 + 1e-9)) ** 2
    amax = 2 * np.arcsin(min(B.tau / 2, 1.0))
    dal = rng.uniform(-amax, amax, probes)
    beta = rng.uniform(0, 2 * np.pi, probes)
    rem = np.maximum(target - chord(0, dal) ** 2, 0)
    # |z|^2 + |cos beta| |z| = rem  along the ray at angle beta from omega
    cb = np.abs(np.cos(beta))
    rad = (-cb + np.sqrt(cb**2 + 4 * rem)) / 2
    zx = c.x[0] + rad * np.cos(c.alpha + beta)
    zy = c.x[1] + rad * np.sin(c.alpha + beta)
    d = metric_d_arrays(q.x[0], q.x[1], q.alpha, zx, zy, c.alpha + dal)
    return bool(np.all(d >= np.sqrt(sigma)))


def _x_minus_sin(x):
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = x * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110 * (1 - x2 / 156)))))
    return np.where(x < 0.5, series, x - np.sin(x))


def level_set_area(rho2):
    """Area of {z in R^2 : |z|^2 + |z_1| <= rho2}, closed form.

    Each quadrant is a circular segment of the disc |z - (1/2, 0)| <= R,
    R^2 = rho2 + 1/4, with half-angle arctan(2 sqrt(rho2)); the segment formula is
    evaluated without cancellation so small rho2 keeps full relative accuracy.
    """
    rho2 = np.maximum(np.asarray(rho2, dtype=float), 0.0)
    R2 = rho2 + 0.25
    x = 2 * np.arctan(2 * np.sqrt(rho2))
    return R2 * _x_minus_sin(x)


@lru_cache(maxsize=None)
def ball_volume(tau: float) -> float:
    """|B_tau| in R^2 x S^1, by quadrature of the level-set area over the angle offset."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    amax = 2 * np.arcsin(min(tau / 2, 1.0))
    f = lambda a: float(level_set_area(tau**2 - 4 * np.sin(a / 2) ** 2))
    val, _ = integrate.quad(f, 0, amax, epsabs=0, epsrel=1e-11, limit=200)
    return 2 * val


def ball_volume_mc(tau: float, samples: int = 200_000, seed: int = 0,
                   center: CospherePoint | None = None) -> tuple[float, float]:
    """Monte-Carlo estimate of |B_tau| and its standard error."""
    rng = np.random.default_rng(seed)
    c = center or CospherePoint((0.0, 0.0), 0.0)
    amax = 2 * np.arcsin(min(tau / 2, 1.0))
    y = rng.uniform(-tau, tau, (samples, 2)) + np.array(c.x)
    b = c.alpha + rng.uniform(-amax, amax, samples)
    inside = metric_d_arrays(c.x[0], c.x[1], c.alpha, y[:, 0], y[:, 1], b) <= tau
    box = (2 * tau) ** 2 * 2 * amax
    frac = inside.mean()
    return box * frac, box * np.sqrt(frac * (1 - frac) / samples)


def slab_volume_exact(j: int, sigma: float) -> float:
    s = 2.0**j * sigma
    hi = float(level_set_area(s))
    return hi if j == 0 else hi - float(level_set_area(s / 2))


def slab_volume(j: int, sigma: float, alpha: float = 0.0, samples: int = 400_000,
                seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo area of {z : 2^{j-1} sigma < |z|^2 + |<omega,z>| <= 2^j sigma}.

    j = 0 drops the lower bound.  Returns (estimate, standard error).
    """
    if not (0 < sigma < 1):
        raise ValueError("sigma must lie in (0, 1)")
    s = 2.0**j * sigma
    om = np.array([np.cos(alpha), np.sin(alpha)])
    # the set lies inside the rotated box |z_par| <= s, |z_perp| <= sqrt(s)
    rng = np.random.default_rng(seed)
    a = min(s, np.sqrt(s))
    u = rng.uniform(-a, a, samples)
    v = rng.uniform(-np.sqrt(s), np.sqrt(s), samples)
    z = np.outer(u, om) + np.outer(v, [-om[1], om[0]])
    val = np.einsum("ij,ij->i", z, z) + np.abs(z @ om)
    inside = val <= s
    if j != 0:
        inside &= val > s / 2
    box = 4 * a * np.sqrt(s)
    frac = inside.mean()
    return box * frac, box * np.sqrt(frac * (1 - frac) / samples)


def fit_slope(x, y) -> float:
    """Least-squares slope of log y against log x."""
    x, y = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(x, y, 1)[0])
