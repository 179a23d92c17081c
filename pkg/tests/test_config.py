import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiohardy.config import (
    DEFAULT_TOLERANCES,
    FAST_PROFILE,
    RunConfig,
    default_K,
    default_M,
    eval_number,
    load_config,
    parse_config,
    serialize_config,
)


def test_fast_profile_defaults():
    c = FAST_PROFILE
    assert (c.N, c.directions, c.J, c.K) == (128, 512, 3, 15)
    assert 2.0 ** (-c.K / c.J) == pytest.approx(1 / 32)
    assert default_M(32) == 256 and default_K(32, 3) == 9
    assert c.tol("partition") == DEFAULT_TOLERANCES["partition"]
    r = c.refined()
    assert (r.N, r.directions, r.K) == (256, 512, 15)


def test_eval_number():
    assert eval_number("4/3") == pytest.approx(4 / 3)
    assert eval_number("2pi") == pytest.approx(2 * np.pi)
    assert eval_number("2*pi") == pytest.approx(2 * np.pi)
    assert eval_number("pi") == pytest.approx(np.pi)
    assert eval_number(" 0.25 ") == 0.25


@pytest.mark.parametrize("text, needle", [
    ("N = 100", "power of two"),
    ("M = 8", "M >= ceil(2 pi / sqrt(sigma_min))"),
    ("J = 0", "J >= 1"),
    ("apertures = 0.5", "aperture >= 1"),
    ("ps = 1", "1 < p < inf"),
    ("sigma_min = 0.3", "sigma_min = 2^(-K/J)"),
    ("N = 32\nsigma_min = 1/64", "Nyquist"),
    ("tol.bogus = 1", "unknown tolerance"),
    ("refine_N = 64", "refine_N > N"),
    ("colour = red", "unknown key"),
    ("just words", "expected 'key = value'"),
])
def test_validation_names_the_violation(text, needle):
    with pytest.raises(ValueError, match=needle.replace("(", r"\(").replace(")", r"\)").replace("^", r"\^")):
        parse_config(text)


def test_parse_comments_auto_and_tolerances():
    cfg = parse_config("""
        # small run
        N = 64        # grid
        M = auto
        ps = 4/3, 2, 4
        tol.equivalence_C = 50
        L = 2pi
    """)
    assert cfg.N == 64 and cfg.M is None and cfg.directions == default_M(64)
    assert cfg.ps == (4 / 3, 2.0, 4.0)
    assert cfg.tol("equivalence_C") == 50


configs = st.builds(
    RunConfig,
    N=st.sampled_from([32, 64, 128]),
    J=st.integers(2, 4),
    apertures=st.lists(st.floats(1, 8), min_size=1, max_size=3).map(tuple),
    ps=st.lists(st.floats(1.01, 10), min_size=1, max_size=3).map(tuple),
    times=st.lists(st.floats(-2, 2), min_size=1, max_size=3).map(tuple),
    threads=st.integers(1, 8),
    tolerances=st.dictionaries(st.sampled_from(sorted(DEFAULT_TOLERANCES)), st.floats(1e-6, 1e3), max_size=3),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_roundtrip_idempotent(cfg):
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == text


def test_load_config(tmp_path):
    assert load_config(None) == RunConfig()
    p = tmp_path / "run.cfg"
    p.write_text("N = 64\nJ = 2\n")
    assert load_config(str(p)).J == 2
