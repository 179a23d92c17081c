import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import roots_legendre

from conftest import random_band_field
from fiohardy.grid import GridSpec, SpatialField
from fiohardy.tents import (
    A_functional,
    A_functional_streaming,
    C_functional,
    TentAccumulator,
    TentConfig,
    _circular_mean,
    angular_halfwidth,
    box_kernel_hat,
    tent_norm,
)
from fiohardy.transforms import coefficient_norm, transform


@pytest.fixture(scope="module")
def F32(fam32):
    return transform(fam32, random_band_field(fam32.grid, 11, fam32.band[1]), "W")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(0, 25), st.integers(0, 1000))
def test_circular_mean_matches_direct_sum(M, h, seed):
    G = np.random.default_rng(seed).standard_normal((M, 3))
    out = _circular_mean(G, h)
    if 2 * h + 1 >= M:
        ref = np.broadcast_to(G.mean(axis=0), G.shape)
    else:
        ref = np.array([G[np.mod(m + np.arange(-h, h + 1), M)].mean(axis=0) for m in range(M)])
    assert np.allclose(out, ref, atol=1e-12)


def test_angular_halfwidth():
    assert angular_halfwidth(64, 0.0) == 0
    h = angular_halfwidth(256, 0.3)
    assert 2 * np.sin(np.pi * h / 256) <= 0.3 < 2 * np.sin(np.pi * (h + 1) / 256)
    assert angular_halfwidth(16, 5.0) == 7


def test_box_kernel_is_rectangle_average():
    """sinc kernel vs Gauss-Legendre average of the trigonometric interpolant."""
    g = GridSpec(32)
    rng = np.random.default_rng(0)
    modes = [(1, 2), (-3, 1), (4, -5), (0, 6)]
    coef = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    X1, X2 = g.x

    def field(x1, x2):
        return sum(c * np.exp(1j * (p * x1 + q * x2)) for c, (p, q) in zip(coef, modes)).real

    G = field(X1, X2)
    alpha, a, b = 0.7, 0.15, 0.4
    avg = np.fft.irfft2(np.fft.rfft2(G) * box_kernel_hat(g, np.array([alpha]), a, b)[0], s=(32, 32))
    u, wu = roots_legendre(40)
    U, V = np.meshgrid(a * u, b * u, indexing="ij")
    W = np.outer(wu, wu) / 4
    for i, j in [(0, 0), (5, 17), (30, 9)]:
        x1 = X1[i, j] + np.cos(alpha) * U - np.sin(alpha) * V
        x2 = X2[i, j] + np.sin(alpha) * U + np.cos(alpha) * V
        assert avg[i, j] == pytest.approx(np.sum(W * field(x1, x2)), abs=1e-12)


def _one_scale_coeffs(fam, k0, c, m0=None):
    F = transform(fam, SpatialField(fam.grid, np.zeros((32, 32))), "W")
    if m0 is None:
        F.coeff[:, k0] = c
    else:
        F.coeff[m0, k0] = c
    return F


def test_single_scale_plateau(fam32):
    k0, c = 4, 1.7
    A = A_functional(_one_scale_coeffs(fam32, k0, c))
    w = fam32.ladder.weight
    assert np.allclose(A, c * np.sqrt(w), rtol=1e-12)
    # one direction only: the angular average spreads it over 2h+1 neighbours
    m0 = 40
    A = A_functional(_one_scale_coeffs(fam32, k0, c, m0))
    h = angular_halfwidth(fam32.directions.M, np.sqrt(fam32.ladder.sigmas[k0]))
    assert np.allclose(A[m0], c * np.sqrt(w / (2 * h + 1)), rtol=1e-12)
    assert np.all(A[m0 + h + 1] == 0)


def test_zero_and_homogeneity(fam32, F32):
    assert not A_functional(F32 * 0.0).any()
    A = A_functional(F32)
    A3 = A_functional(F32 * (-3.0))
    assert np.allclose(A3, 3 * A, rtol=1e-10, atol=1e-14 * A.max())
    for p in (4 / 3, 2, 4):
        assert tent_norm(A3, p, fam32.grid) == pytest.approx(3 * tent_norm(A, p, fam32.grid), rel=1e-10)


def test_fubini_at_p2(fam32, F32):
    """Normalized box averages integrate out, so the p = 2 tent norm is the L^2(S*_+) norm."""
    A = A_functional(F32)
    t = tent_norm(A, 2, fam32.grid)
    n = coefficient_norm(F32)
    assert abs(t**2 - n**2) <= 0.5 * n**2
    assert t == pytest.approx(n, rel=1e-10)


def test_aperture_ratio_bounded_below(fam32, F32):
    A1 = A_functional(F32, 1.0)
    for lam in (2.0, 4.0):
        Al = A_functional(F32, lam)
        for p in (4 / 3, 2, 4):
            assert tent_norm(Al, p, fam32.grid) / tent_norm(A1, p, fam32.grid) >= 1 / 3


def test_streaming_matches_materialized(fam32, F32):
    f = random_band_field(fam32.grid, 11, fam32.band[1])
    S = A_functional_streaming(fam32, f, "W", apertures=(1.0, 2.0))
    for lam in (1.0, 2.0):
        A = A_functional(F32, lam)
        assert np.abs(S[lam] - A).max() <= 1e-10 * A.max()


def test_ball_mode_comparable_to_box(fam32, F32):
    box = A_functional(F32, 1.0, "box")
    ball = A_functional(F32, 1.0, "ball", supersample=2)
    for p in (2, 4):
        r = tent_norm(ball, p, fam32.grid) / tent_norm(box, p, fam32.grid)
        assert 1 / 3 <= r <= 3


def test_config_errors(fam32, F32):
    with pytest.raises(ValueError):
        TentConfig(aperture=0.5)
    with pytest.raises(ValueError):
        TentConfig(mode="disc")
    acc = TentAccumulator(fam32)
    G = np.ones((fam32.directions.M, 32, 32))
    with pytest.raises(ValueError, match="grid cell"):
        acc.add_scale(G, 1e-3, 1.0)
    with pytest.raises(ValueError):
        tent_norm(A_functional(F32), 1.0, fam32.grid)


def test_carleson_functional(fam32, F32):
    kw = dict(stride=8, dir_stride=64)
    C = C_functional(F32, radii=[1.0], **kw)
    assert np.all(C >= 0) and C.max() > 0
    assert np.allclose(C_functional(F32 * 2.0, radii=[1.0], **kw), 2 * C, rtol=1e-10)
    more = C_functional(F32, radii=[1.0, 0.7], **kw)
    assert np.all(more >= C - 1e-14 * C.max())
    assert not C_functional(F32 * 0.0, radii=[1.0], **kw).any()
    with pytest.raises(ValueError):
        C_functional(F32, radii=[], **kw)
