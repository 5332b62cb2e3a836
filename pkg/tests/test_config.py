import pytest
from hypothesis import given, strategies as st

from conley_infinity.config import (
    ENV_VAR,
    Config,
    ConfigError,
    load_config,
    parse_config_text,
    parse_override,
)


def test_defaults():
    cfg = load_config()
    assert cfg == Config()
    assert cfg.integrator().rtol == 1e-9
    assert cfg.labeling().samples == 32


def test_file_then_overrides(tmp_path):
    p = tmp_path / "tol.toml"
    p.write_text("rtol = 1e-7\nflux_samples = 8\n")
    cfg = load_config(p, {"rtol": "1e-6"})
    assert cfg.rtol == 1e-6 and cfg.flux_samples == 8


def test_environment_variable(tmp_path, monkeypatch):
    p = tmp_path / "tol.toml"
    p.write_text("family_horizon = 10\n")
    monkeypatch.setenv(ENV_VAR, str(p))
    assert load_config().family_horizon == 10.0


@pytest.mark.parametrize("text", ["rtoll = 1", "flux_samples = 1.5", "rtol = 'abc'", "rtol = [1]", "rtol = true", "= 3"])
def test_bad_config_rejected(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_override_syntax():
    assert parse_override(" rtol = 1e-3 ") == ("rtol", "1e-3")
    with pytest.raises(ConfigError):
        parse_override("rtol")


@given(st.floats(1e-14, 1e-2), st.integers(1, 500))
def test_round_trip_through_text(rtol, samples):
    cfg = parse_config_text(f"rtol = {rtol!r}\nflux_samples = {samples}\n")
    assert cfg.rtol == rtol and cfg.flux_samples == samples
    again = parse_config_text("\n".join(f"{k} = {v!r}" for k, v in cfg.to_json().items()))
    assert again == cfg
