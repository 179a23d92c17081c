"""Smooth radial profiles: plateau cutoffs, log-centred annular bumps, the
Calderon normalization (continuum and ladder-exact) and the flat-top annulus
used by the second packet family."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

__all__ = [
    "smooth_step",
    "RadialProfile",
    "plateau",
    "bump",
    "build_radial_cutoff",
    "calderon_integral",
    "calderon_normalize",
    "ladder_partition",
    "flat_annulus",
    "gaussian",
]


def _e(x):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x) -> np.ndarray:
    """C^infinity step: 1 for x <= 0, 0 for x >= 1, strictly decreasing between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    a, b = _e(1.0 - x), _e(x)
    return a / (a + b)


@dataclass(frozen=True)
class RadialProfile:
    """A function of t = |zeta| >= 0 with known closed support ``[lo, hi]``."""

    fn: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    name: str = ""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = (t >= self.lo) & (t <= self.hi)
        if np.any(inside):
            out[inside] = self.fn(t[inside])
        return out

    def scaled(self, c: float, name: str | None = None) -> "RadialProfile":
        fn = self.fn
        return RadialProfile(lambda t: c * fn(t), self.lo, self.hi, name or self.name)


def plateau(inner: float, outer: float) -> RadialProfile:
    """1 on [0, inner], smooth monotone decay, exactly 0 beyond ``outer``."""
    if not (0 <= inner < outer):
        raise ValueError(f"degenerate radii inner={inner}, outer={outer}")
    width = outer - inner

    def fn(t):
        return smooth_step((t - inner) / width)

    return RadialProfile(fn, 0.0, outer, f"plateau({inner},{outer})")


def bump(a: float, b: float) -> RadialProfile:
    """exp(-1/(1-u^2)) in the log variable u, supported on [a, b], peak at sqrt(ab)."""
    if not (0 < a < b):
        raise ValueError(f"degenerate radii a={a}, b={b}")
    la, lab = np.log(b / a), np.log(a * b)

    def fn(t):
        u = (2 * np.log(t) - lab) / la
        out = np.zeros_like(u)
        ok = np.abs(u) < 1
        out[ok] = np.exp(1.0 - 1.0 / (1.0 - u[ok] ** 2))
        return out

    return RadialProfile(fn, a, b, f"bump({a},{b})")


def build_radial_cutoff(inner: float, outer: float, kind: str = "plateau") -> RadialProfile:
    if kind == "plateau":
        return plateau(inner, outer)
    if kind == "bump":
        return bump(inner, outer)
    raise ValueError(f"unknown profile kind {kind!r}")


def calderon_integral(prof: RadialProfile) -> float:
    """int_0^inf prof(t)^2 dt/t, by adaptive quadrature in log t."""
    if prof.lo <= 0:
        raise ValueError("profile must be supported away from the origin")
    val, _ = integrate.quad(
        lambda s: float(prof(np.array([np.exp(s)]))[0] ** 2),
        np.log(prof.lo), np.log(prof.hi), epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return val


def ladder_partition(prof: RadialProfile, J: int, t) -> np.ndarray:
    """P(t) = sum_{k in Z} prof(2^{-k/J} t)^2 ln2/J, log-periodic in t."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    tp = t[pos]
    # only k with 2^{-k/J} t in [lo, hi] contribute
    kmin = np.floor(J * np.log2(tp.min() / prof.hi)) - 1 if tp.size else 0
    kmax = np.ceil(J * np.log2(tp.max() / prof.lo)) + 1 if tp.size else 0
    acc = np.zeros(tp.shape)
    for k in range(int(kmin), int(kmax) + 1):
        acc += prof(2.0 ** (-k / J) * tp) ** 2
    out[pos] = acc * np.log(2) / J
    return out


def calderon_normalize(psi_raw: RadialProfile, J: int | None = None, mode: str = "continuum") -> RadialProfile:
    """Scale ``psi_raw`` so that int Psi(t)^2 dt/t = 1.

    ``mode="discrete"`` divides further by sqrt(P) with P the ladder partition
    at J nodes per octave, so the ladder sum is exactly 1 for every t > 0.
    Since P is log-periodic with period 2^{1/J}, the continuum integral stays 1.
    """
    I = calderon_integral(psi_raw)
    if not I > 0:
        raise ValueError("zero profile cannot be normalized")
    cont = psi_raw.scaled(1 / np.sqrt(I), name=psi_raw.name + "/continuum")
    if mode == "continuum":
        return cont
    if mode != "discrete":
        raise ValueError(f"unknown mode {mode!r}")
    if J is None:
        raise ValueError("discrete normalization needs J")
    base = cont.fn

    def fn(t):
        return base(t) / np.sqrt(ladder_partition(cont, J, t))

    return RadialProfile(fn, cont.lo, cont.hi, psi_raw.name + f"/discrete(J={J})")


def flat_annulus(a: float = 0.5, b: float = 2 / 3, c: float = 1.5, d: float = 2.0) -> RadialProfile:
    """Profile equal to 1 on [b, c], zero off [a, d], with int Psi^2 dt/t = 1.

    On the ramps Psi^2 = S(u)^kappa, u the normalized log position; kappa is
    solved so the ramps carry the mass 1 - ln(c/b), which must be positive.
    """
    flat = np.log(c / b)
    deficit = 1.0 - flat
    if deficit <= 0:
        raise ValueError("plateau alone exceeds unit Calderon mass")
    la, ld = np.log(b / a), np.log(d / c)

    def ramp_mass(kappa):
        g = lambda u: float(smooth_step(np.array([u]))[0] ** kappa)
        return la * integrate.quad(g, 0, 1, epsabs=1e-14)[0] + ld * integrate.quad(g, 0, 1, epsabs=1e-14)[0]

    kappa = optimize.brentq(lambda k: ramp_mass(k) - deficit, 1e-3, 1e3, xtol=1e-14)

    def fn(t):
        lt = np.log(t)
        out = np.ones_like(t)
        lo = lt < np.log(b)
        hi = lt > np.log(c)
        out[lo] = smooth_step((np.log(b) - lt[lo]) / la) ** (kappa / 2)
        out[hi] = smooth_step((lt[hi] - np.log(c)) / ld) ** (kappa / 2)
        return out

    prof = RadialProfile(fn, a, d, f"flat_annulus({a},{b},{c},{d})")
    object.__setattr__(prof, "name", prof.name + f"[kappa={kappa:.6g}]")
    return prof


def gaussian() -> Callable[[np.ndarray], np.ndarray]:
    """Phi(zeta) = exp(-|zeta|^2/2), Phi(0) = 1."""
    return lambda t: np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)
