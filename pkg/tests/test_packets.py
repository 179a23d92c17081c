import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiohardy.geometry import DirectionSet, ScaleLadder, chord, fit_slope
from fiohardy.grid import GridSpec
from fiohardy.packets import (
    CutoffBank,
    PacketFamily,
    c_sigma,
    kernel,
    packet_change_ratio,
    packet_decay_profile,
    zoom_decay_profile,
    zoom_symbol,
)


def _polar(fam, idx):
    g = fam.grid
    return g.zeta_abs.reshape(-1)[idx], g.zeta_angle.reshape(-1)[idx]


def test_symbol_at_matches_lattice(fam32):
    for key in ("psi", "theta", "chi"):
        for m, k in [(0, 0), (17, 4), (200, 8)]:
            mult = getattr(fam32, key)(m, k)
            za, ang = _polar(fam32, mult.index)
            assert np.allclose(fam32.symbol_at(key, m, k, za, ang), mult.values, rtol=1e-12, atol=1e-14)


def test_symbol_at_empty_input(fam32):
    assert fam32.symbol_at("chi", 3, 2, np.zeros(0), np.zeros(0)).shape == (0,)


def test_on_axis_value_continuum_family(grid32):
    fam = PacketFamily(grid32, DirectionSet(256), ScaleLadder(3, 9), discrete=False)
    for k in (0, 4, 8):
        sig = fam.ladder.sigmas[k]
        m = 40
        val = fam.symbol_at("psi", m, k, np.array([1 / sig]), np.array([m * fam.directions.weight]))[0]
        assert val == pytest.approx(fam.c_ladder[k] * fam.bank.Psi(np.array([1.0]))[0], rel=1e-13)


def test_c_sigma_slope_and_quadrature():
    phi = CutoffBank.standard().phi
    sig = 2.0 ** (-np.arange(1, 16) / 3)
    c = np.array([c_sigma(s, phi) for s in sig])
    assert fit_slope(sig, c) == pytest.approx(-0.25, abs=0.05)
    for s in sig:
        assert c_sigma(s, phi, 4096) == pytest.approx(c_sigma(s, phi, 8192), rel=1e-6)
    with pytest.raises(ValueError):
        c_sigma(1e-8, phi, 64)
    with pytest.raises(ValueError):
        c_sigma(0.0, phi)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * np.pi), st.floats(1e-3, 1.0))
def test_c_sigma_rotation_invariant(angle, sigma):
    phi = CutoffBank.standard().phi
    assert c_sigma(sigma, phi, ref_angle=angle) == pytest.approx(c_sigma(sigma, phi), rel=1e-10)


def test_support_statements(fam32):
    g = fam32.grid
    za, ang = g.zeta_abs.reshape(-1), g.zeta_angle.reshape(-1)
    dw = fam32.directions.weight
    for sb in fam32.scales:
        m = sb.owner
        z, a = za[sb.index], ang[sb.index]
        s = sb.sigma
        assert np.all((z >= 0.5 / s) & (z <= 2 / s))
        assert np.all(chord(a, m * dw) <= 2 * np.sqrt(s))
        assert np.all(z > 0)
        psi = sb.values["psi"]
        assert np.all(chord(a[psi != 0], m[psi != 0] * dw) <= 0.25 * np.sqrt(s))
    st_ = fam32.phi_omega_stack
    z, a = za[st_.index], ang[st_.index]
    assert np.all(z >= 1 / 8)
    assert np.all(chord(a, st_.owner * dw) <= 2 / np.sqrt(z))


def test_sup_bounds_across_ladder(fast_ctx):
    fam = fast_ctx.family
    c_psi = np.array([np.abs(sb.values["psi"]).max() * sb.sigma**0.25 for sb in fam.scales])
    c_chi = np.array([np.abs(sb.values["chi"]).max() * sb.sigma**0.25 for sb in fam.scales])
    assert np.all((c_psi >= 0.2) & (c_psi <= 5))
    # chi carries the inverse angular energy; measured constant is about 6.3
    assert np.all((c_chi >= 0.2) & (c_chi <= 8))
    assert c_chi.max() / c_chi.min() < 1.6


def test_chi_times_energy_is_theta(fam32):
    A = fam32.angular_energy.reshape(-1)
    for sb in fam32.scales:
        th, ch = sb.values["theta"], sb.values["chi"]
        assert np.array_equal(th != 0, ch != 0)
        nz = th != 0
        assert np.allclose(ch[nz] * A[sb.index[nz]], th[nz], rtol=1e-13)


def test_angular_energy_bounded_and_radial(fam64):
    za = fam64.grid.zeta_abs
    band = (za >= 1) & (za <= fam64.band[1])
    A = fam64.angular_energy[band]
    assert A.max() / A.min() <= 10
    r = np.round(za[band] ** 2).astype(int)
    for shell in np.unique(r)[::7]:
        v = A[r == shell]
        if v.size > 4:
            assert v.var() / v.mean() ** 2 <= 1e-3


def test_partition_identities(fam32):
    band = fam32.grid.zeta_abs <= fam32.band[1]
    assert np.abs(fam32.partition_residual()[band]).max() < 1e-12
    assert np.abs(fam32.packet_sum("W")[band] - 1).max() < 1e-12
    assert np.abs(fam32.packet_sum("U")[band] - 1).max() < 1e-12


def test_radial_multipliers(fam32):
    za = fam32.grid.zeta_abs
    assert fam32.r[0, 0] == 1 and fam32.s[0, 0] == pytest.approx(1, abs=1e-15)
    assert np.all(fam32.s[za > 2] == 0)
    assert np.all(fam32.h[fam32.s != 0] == 1)
    assert fam32.bank.q(np.array([1.9]))[0] == 1
    assert np.all(fam32.q[za > 4] == 0)
    for sb in fam32.scales:
        assert np.all(sb.values["psi"][fam32.grid.zeta_abs.reshape(-1)[sb.index] == 0] == 0)


def test_peak_matches_quadrature_oracle(fam64):
    """Peak |F^-1 psi| = (2 pi)^-2 int psi dzeta for psi >= 0, by polar quadrature."""
    for k in (3, 9):
        m = 11
        sig = fam64.ladder.sigmas[k]
        vals, _, hp, hq = zoom_symbol(fam64, "psi", m, k, n=256)
        rep = zoom_decay_profile(vals, sig, hp, hq)
        alpha = m * fam64.directions.weight
        t = np.linspace(0.8 / sig, 1.25 / sig, 801)
        b = np.linspace(-0.6, 0.6, 1601) * np.sqrt(sig)
        T, B = np.meshgrid(t, b, indexing="ij")
        v = fam64.symbol_at("psi", m, k, T, alpha + B)
        integral = np.trapezoid(np.trapezoid(v * T, b, axis=1), t)
        assert rep.peak == pytest.approx(integral / (2 * np.pi) ** 2, rel=2e-3)


def test_low_frequency_kernel_l1_bounded():
    masses = []
    for N in (32, 64, 128):
        g = GridSpec(N)
        fam_q = CutoffBank.standard().q(g.zeta_abs)
        from fiohardy.grid import Multiplier

        masses.append(np.abs(kernel(Multiplier.from_dense(g, fam_q))).sum() * g.dx**2)
    assert max(masses) < 5
    assert max(masses) / min(masses) < 1.05


def test_decay_tail_zoom_route(fam64):
    for key in ("psi", "chi"):
        vals, sig, hp, hq = zoom_symbol(fam64, key, 5, 6, n=512)
        rep = zoom_decay_profile(vals, sig, hp, hq, fit_range=(1e4, 1e6))
        assert rep.slope <= -2


def test_lattice_decay_report(fam64):
    k, m = 6, 5
    sig = fam64.ladder.sigmas[k]
    rep = packet_decay_profile(fam64.psi(m, k), m * fam64.directions.weight, sig)
    assert rep.peak == pytest.approx(np.abs(kernel(fam64.psi(m, k))).max())
    assert rep.sup[0] == pytest.approx(rep.peak, rel=1e-14)
    assert rep.l1_mass > 0


def test_packet_change_ratio(fam32, tilde32):
    mins = []
    for k in (4, 6, 8):
        sig = fam32.ladder.sigmas[k]
        m = 30
        nu = m * fam32.directions.weight + 0.5 * np.sqrt(sig) / 16
        eta, dmin = packet_change_ratio(fam32, tilde32, m, nu, k)
        th = fam32.theta(m, k)
        assert set(eta.index) <= set(th.index[th.values != 0])
        assert np.all(np.isfinite(eta.values))
        mins.append(dmin * sig**0.25)
    assert min(mins) > 0 and max(mins) / min(mins) < 3
    with pytest.raises(ValueError, match="sqrt"):
        packet_change_ratio(fam32, tilde32, 30, 30 * fam32.directions.weight + 0.2, 8)


def test_eta_zoom_requires_tilde(fam32):
    with pytest.raises(ValueError):
        zoom_symbol(fam32, "eta", 0, 2)
