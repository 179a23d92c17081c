import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiohardy.grid import (
    GridSpec,
    Multiplier,
    SpatialField,
    SpectralField,
    apply_multiplier,
    l2_norm,
    lp_norm,
    to_spatial,
    to_spectral,
)


def direct_dft(f, grid):
    """Double-loop oracle for F f(zeta) = sum_x e^{-i x.zeta} f(x) dx^2."""
    N = grid.N
    x = grid.x_axis
    z = grid.freq_axis
    out = np.zeros((N, N), dtype=complex)
    E = np.exp(-1j * np.outer(z, x))  # (zeta, x)
    for a in range(N):
        for b in range(N):
            out[a, b] = np.sum(E[a][:, None] * E[b][None, :] * f) * grid.dx**2
    return out


def test_gridspec_rejects_bad_sizes():
    with pytest.raises(ValueError):
        GridSpec(48)
    with pytest.raises(ValueError):
        GridSpec(16)
    with pytest.raises(ValueError):
        GridSpec(32, L=-1.0)


def test_spectral_matches_direct_dft_and_parseval(grid32):
    rng = np.random.default_rng(0)
    f = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    fh = to_spectral(SpatialField(grid32, f)).data
    assert np.allclose(fh, direct_dft(f, grid32), rtol=0, atol=1e-10 * np.abs(fh).max())
    n_space = np.sqrt(np.sum(np.abs(f) ** 2) * grid32.dx**2)
    n_freq = np.sqrt(np.sum(np.abs(fh) ** 2) * grid32.dzeta**2) / (2 * np.pi)
    assert abs(n_space - n_freq) / n_space < 1e-12


def test_constant_and_plane_wave(grid32):
    one = SpatialField(grid32, np.ones((32, 32)))
    fh = to_spectral(one).data
    assert np.count_nonzero(np.abs(fh) > 1e-9) == 1 and abs(fh[0, 0]) > 0
    X1, X2 = grid32.x
    pw = SpatialField(grid32, np.exp(1j * (3 * X1 - 5 * X2)))
    fh = np.abs(to_spectral(pw).data)
    i, j = np.unravel_index(np.argmax(fh), fh.shape)
    assert (grid32.freq_axis[i], grid32.freq_axis[j]) == (3.0, -5.0)
    assert np.sum(fh > 1e-9) == 1


def test_roundtrip(grid32):
    rng = np.random.default_rng(1)
    f = SpatialField(grid32, rng.standard_normal((32, 32)) + 0j)
    back = to_spatial(to_spectral(f))
    assert np.abs(back.data - f.data).max() / np.abs(f.data).max() < 1e-12


def test_multiplier_identity_zero_and_half_lattice(grid32):
    X1, X2 = grid32.x
    f = SpatialField(grid32, np.exp(1j * (2 * X1 + 7 * X2)))
    one = Multiplier.from_dense(grid32, np.ones((32, 32)))
    zero = Multiplier.from_dense(grid32, np.zeros((32, 32)))
    assert np.allclose(apply_multiplier(one, f).data, f.data, atol=1e-13)
    assert np.abs(apply_multiplier(zero, f).data).max() == 0
    half = Multiplier.from_dense(grid32, (grid32.zeta[1] > 0).astype(float))
    assert np.allclose(apply_multiplier(half, f).data, f.data, atol=1e-13)
    g = SpatialField(grid32, np.exp(1j * (2 * X1 - 7 * X2)))
    assert np.abs(apply_multiplier(half, g).data).max() < 1e-13


def test_multiplier_zero_off_support(grid32):
    rng = np.random.default_rng(2)
    d = rng.standard_normal((32, 32)) * (rng.random((32, 32)) < 0.3)
    m = Multiplier.from_dense(grid32, d)
    dense = m.dense()
    assert np.array_equal(dense, d)
    assert np.all(dense[~m.support_mask] == 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_composition_commutes_and_matches_product(seed):
    g = GridSpec(32)
    rng = np.random.default_rng(seed)
    a = Multiplier.from_dense(g, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)))
    b = Multiplier.from_dense(g, rng.standard_normal((32, 32)))
    f = SpatialField(g, rng.standard_normal((32, 32)) + 0j)
    ab = apply_multiplier(a, apply_multiplier(b, f)).data
    ba = apply_multiplier(b, apply_multiplier(a, f)).data
    prod = apply_multiplier(a * b, f).data
    scale = np.abs(prod).max()
    assert np.abs(ab - ba).max() <= 1e-12 * scale
    assert np.abs(ab - prod).max() <= 1e-12 * scale


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_hermitian_symbol_preserves_real_fields(seed):
    g = GridSpec(32)
    rng = np.random.default_rng(seed)
    m0 = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    neg = np.roll(np.flip(m0, (0, 1)), 1, axis=(0, 1))  # m(-zeta)
    m = Multiplier.from_dense(g, 0.5 * (m0 + np.conj(neg)))
    f = SpatialField(g, rng.standard_normal((32, 32)) + 0j)
    out = apply_multiplier(m, f).data
    assert np.abs(out.imag).max() <= 1e-12 * np.abs(out).max()


def test_lp_norm_constant_homogeneity_and_errors(grid32):
    c = 1.7 - 0.3j
    f = SpatialField(grid32, np.full((32, 32), c))
    for p in (4 / 3, 2, 4):
        assert lp_norm(f, p) == pytest.approx(abs(c) * (2 * np.pi) ** (2 / p), rel=1e-12)
        assert lp_norm(f * 3.0, p) == pytest.approx(3 * lp_norm(f, p), rel=1e-12)
    for bad in (1.0, 0.5, np.inf):
        with pytest.raises(ValueError):
            lp_norm(f, bad)


def test_l2_of_gaussian_matches_closed_form():
    g = GridSpec(128, L=2 * np.pi)
    X1, X2 = g.x
    a = 0.4
    X1 = np.where(X1 > np.pi, X1 - 2 * np.pi, X1)
    X2 = np.where(X2 > np.pi, X2 - 2 * np.pi, X2)
    f = SpatialField(g, np.exp(-(X1**2 + X2**2) / (2 * a * a)) + 0j)
    exact = np.sqrt(np.pi * a * a)  # int exp(-|x|^2/a^2) dx over R^2
    assert l2_norm(f) == pytest.approx(exact, rel=1e-6)


def test_field_shape_check(grid32):
    with pytest.raises(ValueError):
        SpatialField(grid32, np.zeros((16, 16)))
    with pytest.raises(ValueError):
        SpectralField(grid32, np.zeros((32, 16)))
