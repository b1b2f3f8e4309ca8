import pytest
from hypothesis import given, strategies as st

from qhj_impulse.config import RunConfig, parse_config, serialize_config
from qhj_impulse.errors import ValidationError

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_defaults_round_trip():
    text = serialize_config(RunConfig())
    assert parse_config(text) == RunConfig()
    assert serialize_config(parse_config(text)) == text


@given(finite, finite, finite, st.integers(0, 2**63), st.sampled_from(["fixed", "random"]))
def test_round_trip_is_idempotent(a, c, gamma, seed, source):
    cfg = RunConfig(a=a, c=c, gamma=gamma, seed=seed, source=source)
    text = serialize_config(cfg)
    assert parse_config(text) == cfg
    assert serialize_config(parse_config(text)) == text


def test_partial_file_and_overrides():
    cfg = parse_config("[microstate]\na = 2\nb = 3\nc = 1\n[impulse]\nepsilon = 0.05\n")
    assert cfg.microstate().as_tuple() == (2.0, 3.0, 1.0)
    assert cfg.epsilon == 0.05 and cfg.n == RunConfig().n
    assert cfg.with_overrides(a=4.0, b=None).a == 4.0
    assert cfg.with_overrides(a=4.0, b=None).b == 3.0


@pytest.mark.parametrize("text", ["[nope]\nx = 1\n", "[well]\nhbar = one\n", "[well]\nmass = 1\n", "garbage"])
def test_bad_files(text):
    with pytest.raises(ValidationError):
        parse_config(text)


def test_invalid_microstate_surfaces_on_use():
    cfg = parse_config("[microstate]\na = 1\nb = 1\nc = 2\n")
    with pytest.raises(ValidationError):
        cfg.microstate()
