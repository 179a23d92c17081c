from functools import lru_cache

import numpy as np
import pytest

from fiohardy.config import FAST_PROFILE
from fiohardy.geometry import DirectionSet, ScaleLadder
from fiohardy.grid import GridSpec, SpatialField, l2_norm
from fiohardy.packets import PacketFamily
from fiohardy.verify import VerifyContext

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])


@pytest.fixture(scope="session")
def grid32():
    return GridSpec(32)


@lru_cache(maxsize=None)
def fam_cache():
    """Small family: band |zeta| <= 8, ladder down to 2^-3 (shared with hypothesis tests)."""
    return PacketFamily(GridSpec(32), DirectionSet(256), ScaleLadder(3, 9))


@pytest.fixture(scope="session")
def fam32():
    return fam_cache()


@pytest.fixture(scope="session")
def tilde32(grid32):
    return PacketFamily(grid32, DirectionSet(256), ScaleLadder(3, 9), profile="tilde")


@pytest.fixture(scope="session")
def fam64():
    return PacketFamily(GridSpec(64), DirectionSet(256), ScaleLadder(3, 12))


@pytest.fixture(scope="session")
def fast_ctx():
    """Shared fast-profile context; measurements are computed once per session."""
    return VerifyContext(FAST_PROFILE)


def random_band_field(grid, seed, band, real=False):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal((grid.N, grid.N))
    c *= (grid.zeta_abs <= band)
    f = np.fft.ifft2(c)
    if real:
        f = f.real + 0j
    f = SpatialField(grid, f)
    return SpatialField(grid, f.data / l2_norm(f))
