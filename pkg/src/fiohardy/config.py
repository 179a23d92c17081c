"""Run configuration: a line-oriented ``key = value`` text format.

Unset geometry keys are derived from the grid: the direction count resolves the
finest angular profile and the ladder reaches the top of the resolved band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

__all__ = ["RunConfig", "parse_config", "serialize_config", "load_config", "default_M", "default_K",
           "FAST_PROFILE", "DEFAULT_TOLERANCES"]

DEFAULT_TOLERANCES = {
    "partition": 1e-12,
    "reproduce": 1e-10,
    "isometry": 1e-2,
    "slope_c": 0.05,
    "slope_sup": 0.1,
    "slope_peak": 0.15,
    "slope_volume": 0.3,
    "slope_slab": 0.2,
    "angular_maxmin": 10.0,
    "radiality": 1e-3,
    "decay_slope": -2.0,
    "aperture_p4": 5.0,
    "aperture_exponent": 1.5,
    "equivalence_C": 100.0,
    "refinement_drift": 0.25,
    "l2_factor": 5.0,
    "corollary_spread": 100.0,
    "halfwave_band": 3.0,
    "unitarity": 1e-10,
    "maximal_stability": 1e-2,
}


def default_M(N: int, L: float = 2 * np.pi) -> int:
    """2^ceil(log2(90 sqrt(zeta_max))) with zeta_max the top of the resolved band."""
    zmax = np.pi * N / L / 2
    return int(2 ** math.ceil(math.log2(90 * math.sqrt(zmax))))


def default_K(N: int, J: int, L: float = 2 * np.pi) -> int:
    """Smallest K whose exact band 0.8 * 2^((K+1)/J) reaches zeta_max."""
    zmax = np.pi * N / L / 2
    K = 1
    while 0.8 * 2 ** ((K + 1) / J) < zmax:
        K += 1
    return K


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(eval_number(t)) for t in text.split(",") if t.strip())


def eval_number(text: str) -> float:
    """Numbers, fractions a/b and 'pi' multiples; nothing else."""
    t = text.strip().replace(" ", "")
    if "/" in t:
        a, b = t.split("/", 1)
        return eval_number(a) / eval_number(b)
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head else 1.0) * np.pi
    return float(t)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    N: int = 128
    L: float = 2 * np.pi
    M: int | None = None
    J: int = 3
    sigma_min: float | None = None
    profile: str = "standard"
    apertures: tuple[float, ...] = (1.0, 2.0, 4.0)
    ps: tuple[float, ...] = (4 / 3, 2.0, 4.0)
    suite: str = "default"
    refine_N: int | None = None
    times: tuple[float, ...] = (0.25, 0.5, 1.0)
    threads: int = 1
    report: str = "report.json"
    csv_dir: str = "tables"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 32 or self.N & (self.N - 1):
            raise ValueError(f"N >= 32 and N a power of two violated (N={self.N})")
        if not self.L > 0:
            raise ValueError(f"L > 0 violated (L={self.L})")
        if self.J < 1:
            raise ValueError(f"J >= 1 violated (J={self.J})")
        if self.profile not in ("standard", "tilde"):
            raise ValueError(f"profile in {{standard, tilde}} violated ({self.profile!r})")
        if any(not a >= 1 for a in self.apertures):
            raise ValueError(f"aperture >= 1 violated ({self.apertures})")
        if any(not (np.isfinite(p) and p > 1) for p in self.ps):
            raise ValueError(f"1 < p < inf violated ({self.ps})")
        if self.threads < 1:
            raise ValueError(f"threads >= 1 violated ({self.threads})")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys {sorted(unknown)}")
        if self.refine_N is not None and self.refine_N <= self.N:
            raise ValueError(f"refine_N > N violated ({self.refine_N} <= {self.N})")
        K = self.K
        smin = 2.0 ** (-K / self.J)
        dx = self.L / self.N
        nyq = np.pi * self.N / self.L
        if 1.25 / smin > nyq:
            raise ValueError(f"1.25 / sigma_min <= Nyquist violated ({1.25 / smin:g} > {nyq:g})")
        if 2 * smin < dx:
            raise ValueError(f"2 sigma_min >= dx violated ({2 * smin:g} < {dx:g})")
        need = math.ceil(2 * np.pi / math.sqrt(smin))
        if self.directions < need:
            raise ValueError(f"M >= ceil(2 pi / sqrt(sigma_min)) = {need} violated (M={self.directions})")

    @property
    def K(self) -> int:
        if self.sigma_min is None:
            return default_K(self.N, self.J, self.L)
        K = round(-self.J * math.log2(self.sigma_min))
        if K < 1 or abs(2.0 ** (-K / self.J) - self.sigma_min) > 1e-9 * self.sigma_min:
            raise ValueError(f"sigma_min = 2^(-K/J) for an integer K >= 1 violated ({self.sigma_min})")
        return K

    @property
    def directions(self) -> int:
        return self.M if self.M is not None else default_M(self.N, self.L)

    def tol(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def refined(self) -> "RunConfig":
        """Same ladder and directions on the refined grid (same torus)."""
        return replace(self, N=self.refine_N or 2 * self.N, M=self.directions,
                       sigma_min=2.0 ** (-self.K / self.J), refine_N=None)

    def build(self, N: int | None = None):
        """(GridSpec, DirectionSet, ScaleLadder) for this config, optionally on another grid size."""
        from .geometry import DirectionSet, ScaleLadder
        from .grid import GridSpec

        return GridSpec(N or self.N, self.L), DirectionSet(self.directions), ScaleLadder(self.J, self.K)


FAST_PROFILE = RunConfig()

_TUPLES = {"apertures", "ps", "times"}
_INTS = {"N", "M", "J", "threads", "refine_N"}
_FLOATS = {"L", "sigma_min"}
_STRS = {"profile", "suite", "report", "csv_dir"}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; '#' starts a comment; tol.<name> overrides a tolerance."""
    kw: dict = {}
    tols: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key.startswith("tol."):
            tols[key[4:]] = eval_number(val)
        elif key in _TUPLES:
            kw[key] = _floats(val)
        elif key in _INTS:
            kw[key] = None if val.lower() == "auto" else int(val)
        elif key in _FLOATS:
            kw[key] = None if val.lower() == "auto" else eval_number(val)
        elif key in _STRS:
            kw[key] = val
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if tols:
        kw["tolerances"] = tols
    return RunConfig(**kw)


def serialize_config(cfg: RunConfig) -> str:
    out = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "tolerances":
            for k in sorted(v):
                out.append(f"tol.{k} = {_fmt(v[k])}")
        elif v is None:
            out.append(f"{f.name} = auto")
        elif f.name in _TUPLES:
            out.append(f"{f.name} = " + ", ".join(_fmt(x) for x in v))
        elif f.name in _FLOATS:
            out.append(f"{f.name} = {_fmt(v)}")
        else:
            out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path) as fh:
        return parse_config(fh.read())
