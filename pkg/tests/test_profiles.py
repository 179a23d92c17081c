import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiohardy.packets import CutoffBank
from fiohardy.profiles import (
    bump,
    calderon_integral,
    calderon_normalize,
    flat_annulus,
    ladder_partition,
    plateau,
    smooth_step,
)


def test_smooth_step_endpoints_and_monotone():
    x = np.linspace(-0.5, 1.5, 2001)
    s = smooth_step(x)
    assert np.all(s[x <= 0] == 1) and np.all(s[x >= 1] == 0)
    mid = (x > 0.05) & (x < 0.95)  # values round to 0 or 1 closer to the ends
    assert np.all((s[mid] > 0) & (s[mid] < 1))
    assert np.all(np.diff(s[mid]) < 0)
    assert np.all(np.diff(s) <= 0)
    assert smooth_step(np.array([0.5]))[0] == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.05, 2.0))
def test_plateau_shape(inner, width):
    p = plateau(inner, inner + width)
    t = np.linspace(0, inner + 2 * width, 500)
    v = p(t)
    assert np.all(v[t <= inner] == 1)
    assert np.all(v[t >= inner + width] == 0)
    assert np.all(np.diff(v) <= 0)


def test_plateau_and_bump_reject_degenerate():
    with pytest.raises(ValueError):
        plateau(0.5, 0.5)
    with pytest.raises(ValueError):
        bump(1.0, 0.5)


def test_bump_support_and_peak():
    b = bump(0.8, 1.25)
    assert b(np.array([0.79, 1.26, 0.8, 1.25])).max() == 0
    t = np.linspace(0.81, 1.24, 4001)
    assert t[np.argmax(b(t))] == pytest.approx(1.0, abs=2e-4)


def test_continuum_calderon_is_one():
    Psi = calderon_normalize(bump(0.8, 1.25))
    assert calderon_integral(Psi) == pytest.approx(1.0, abs=1e-10)


def test_discrete_renormalization_flattens_ladder_sum():
    raw = bump(0.8, 1.25)
    cont = calderon_normalize(raw)
    disc = calderon_normalize(raw, 4, mode="discrete")
    t = np.geomspace(1.0, 64.0, 20001)
    before = np.abs(ladder_partition(cont, 4, t) - 1).max()
    after = np.abs(ladder_partition(disc, 4, t) - 1).max()
    assert after < 1e-12
    # the raw bump is too narrow for J = 4 to be nearly flat by itself
    assert 0.05 < before < 0.5
    assert disc.lo == raw.lo and disc.hi == raw.hi
    # log-periodic renormalization keeps the continuum mass
    assert calderon_integral(disc) == pytest.approx(1.0, abs=1e-6)


def test_normalize_errors():
    raw = bump(0.8, 1.25)
    with pytest.raises(ValueError):
        calderon_normalize(raw, mode="discrete")
    with pytest.raises(ValueError):
        calderon_normalize(raw, 3, mode="other")
    with pytest.raises(ValueError):
        calderon_integral(plateau(0.5, 1.0))


def test_flat_annulus():
    p = flat_annulus()
    t = np.linspace(2 / 3, 1.5, 101)
    assert np.allclose(p(t), 1.0, atol=1e-14)
    assert p(np.array([0.49, 2.01])).max() == 0
    assert calderon_integral(p) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        flat_annulus(0.1, 0.2, 1.5, 2.0)


def test_cutoff_banks():
    std = CutoffBank.standard(3)
    assert std.phi(np.array([0.0, 0.125]))[0] == 1 and std.phi(np.array([0.25]))[0] == 0
    assert std.q(np.array([1.9]))[0] == 1 and std.q(np.array([4.0]))[0] == 0
    tl = CutoffBank.tilde(3)
    assert tl.phi(np.array([0.75]))[0] == 1 and tl.phi(np.array([1.0]))[0] == 0
    assert np.abs(ladder_partition(tl.Psi, 3, np.geomspace(1, 8, 999)) - 1).max() < 1e-12
