"""Flat binary formats.

FLD1   ``FLD1 <N> <N> <L> <spatial|spectral>\\n`` then N^2 little-endian float64
       (re, im) pairs, row-major.
FAM1   ``FAM1 <N> <L> <M> <J> <K> <profile> <discrete>\\n`` then, for each of
       psi, theta, chi, each scale k and direction m, a record
       ``int64 count | int64 index[count] | float64 (re, im)[count]``,
       followed by dense r, s, h records in the same layout.
COEF1  ``COEF1 <which> <N> <L> <M> <J> <K> <profile> <discrete>\\n`` then one
       FLD1 block per channel (m-major, then k) and one for the coarse field.
"""
from __future__ import annotations

import io

import numpy as np

from .geometry import DirectionSet, ScaleLadder
from .grid import GridSpec, SpatialField, SpectralField, to_spatial, to_spectral
from .packets import PacketFamily
from .transforms import PacketCoefficients

__all__ = [
    "write_field",
    "read_field",
    "write_family",
    "read_family",
    "write_coefficients",
    "read_coefficients",
    "write_spectrum",
]

_LE = np.dtype("<f8")
_LEI = np.dtype("<i8")


def _write_fld(fh, data: np.ndarray, L: float, domain: str):
    N = data.shape[0]
    fh.write(f"FLD1 {N} {N} {L!r} {domain}\n".encode("ascii"))
    pairs = np.empty((N, N, 2), dtype=_LE)
    pairs[..., 0], pairs[..., 1] = data.real, data.imag
    fh.write(pairs.tobytes())


def _read_fld(fh) -> tuple[np.ndarray, float, str]:
    head = fh.readline().decode("ascii").split()
    if len(head) != 5 or head[0] != "FLD1":
        raise ValueError(f"not an FLD1 block: {head!r}")
    N1, N2 = int(head[1]), int(head[2])
    if N1 != N2:
        raise ValueError("only square fields are supported")
    L, domain = float(head[3]), head[4]
    if domain not in ("spatial", "spectral"):
        raise ValueError(f"unknown domain {domain!r}")
    raw = fh.read(16 * N1 * N2)
    if len(raw) != 16 * N1 * N2:
        raise ValueError("truncated FLD1 payload")
    pairs = np.frombuffer(raw, dtype=_LE).reshape(N1, N2, 2)
    return pairs[..., 0] + 1j * pairs[..., 1], L, domain


def write_field(path: str, f: SpatialField | SpectralField):
    domain = "spectral" if isinstance(f, SpectralField) else "spatial"
    with open(path, "wb") as fh:
        _write_fld(fh, np.asarray(f.data), f.grid.L, domain)


def read_field(path: str) -> SpatialField:
    """Read an FLD1 file; spectral files are converted to the spatial domain."""
    with open(path, "rb") as fh:
        data, L, domain = _read_fld(fh)
    grid = GridSpec(data.shape[0], L)
    if domain == "spectral":
        return to_spatial(SpectralField(grid, data))
    return SpatialField(grid, data)


def _family_header(fam: PacketFamily) -> str:
    g = fam.grid
    return (f"{g.N} {g.L!r} {fam.directions.M} {fam.ladder.J} {fam.ladder.K} "
            f"{fam.profile} {int(fam.discrete)}")


def _family_from_header(tok: list[str]) -> PacketFamily:
    N, L, M, J, K = int(tok[0]), float(tok[1]), int(tok[2]), int(tok[3]), int(tok[4])
    return PacketFamily(GridSpec(N, L), DirectionSet(M), ScaleLadder(J, K),
                        profile=tok[5], discrete=bool(int(tok[6])))


def _write_record(fh, index: np.ndarray, values: np.ndarray):
    fh.write(np.array([index.size], dtype=_LEI).tobytes())
    fh.write(index.astype(_LEI).tobytes())
    pairs = np.empty((index.size, 2), dtype=_LE)
    pairs[:, 0], pairs[:, 1] = values.real, values.imag
    fh.write(pairs.tobytes())


def _read_record(fh) -> tuple[np.ndarray, np.ndarray]:
    n = int(np.frombuffer(fh.read(8), dtype=_LEI)[0])
    idx = np.frombuffer(fh.read(8 * n), dtype=_LEI)
    pairs = np.frombuffer(fh.read(16 * n), dtype=_LE).reshape(n, 2)
    return idx, pairs[:, 0] + 1j * pairs[:, 1]


def write_family(path: str, fam: PacketFamily):
    M = fam.directions.M
    with open(path, "wb") as fh:
        fh.write(f"FAM1 {_family_header(fam)}\n".encode("ascii"))
        for key in ("psi", "theta", "chi"):
            for sb in fam.scales:
                for m in range(M):
                    sl = sb.slice(m)
                    _write_record(fh, sb.index[sl], sb.values[key][sl].astype(complex))
        for which in ("W", "V", "U"):
            sym = fam.coarse_symbol(which).reshape(-1)
            nz = np.flatnonzero(sym)
            _write_record(fh, nz, sym[nz].astype(complex))


def read_family(path: str, check: bool = True, atol: float = 1e-12) -> PacketFamily:
    """Rebuild the family from the header parameters and compare it with the stored records."""
    with open(path, "rb") as fh:
        head = fh.readline().decode("ascii").split()
        if not head or head[0] != "FAM1":
            raise ValueError("not a FAM1 file")
        fam = _family_from_header(head[1:])
        if not check:
            return fam
        M = fam.directions.M
        for key in ("psi", "theta", "chi"):
            for sb in fam.scales:
                for m in range(M):
                    idx, vals = _read_record(fh)
                    sl = sb.slice(m)
                    if not np.array_equal(idx, sb.index[sl]) or not np.allclose(
                            vals, sb.values[key][sl], rtol=0, atol=atol):
                        raise ValueError(f"stored {key} record (m={m}, k={sb.k}) disagrees with the rebuilt family")
        for which in ("W", "V", "U"):
            idx, vals = _read_record(fh)
            sym = fam.coarse_symbol(which).reshape(-1)
            if not np.allclose(sym[idx], vals, rtol=0, atol=atol):
                raise ValueError(f"stored coarse symbol for {which} disagrees with the rebuilt family")
    return fam


def write_coefficients(path: str, F: PacketCoefficients):
    fam = F.family
    with open(path, "wb") as fh:
        fh.write(f"COEF1 {F.which} {_family_header(fam)}\n".encode("ascii"))
        buf = io.BytesIO()
        for m in range(fam.directions.M):
            for k in range(fam.ladder.K):
                buf.seek(0)
                buf.truncate()
                _write_fld(buf, F.coeff[m, k], fam.grid.L, "spatial")
                fh.write(buf.getvalue())
        _write_fld(fh, F.coarse, fam.grid.L, "spatial")


def read_coefficients(path: str, family: PacketFamily | None = None) -> PacketCoefficients:
    with open(path, "rb") as fh:
        head = fh.readline().decode("ascii").split()
        if not head or head[0] != "COEF1":
            raise ValueError("not a COEF1 file")
        which = head[1]
        fam = family or _family_from_header(head[2:])
        if _family_header(fam).split() != head[2:]:
            raise ValueError("coefficients were computed with a different family")
        M, K, N = fam.directions.M, fam.ladder.K, fam.grid.N
        coeff = np.empty((M, K, N, N), dtype=complex)
        for m in range(M):
            for k in range(K):
                coeff[m, k] = _read_fld(fh)[0]
        coarse = _read_fld(fh)[0]
    return PacketCoefficients(fam, which, coeff, coarse)


def write_spectrum(path: str, f: SpatialField):
    write_field(path, to_spectral(f))
