"""Numerical tolerances, loaded from a ``key = value`` file.

The file is read with a TOML parser, so values follow TOML syntax
(``rtol = 1e-9``).  Its path comes from the ``--config`` flag or the
``CONLEY_CONFIG`` environment variable; ``--set key=value`` flags override
single entries.  Unknown keys are rejected so that typos do not silently
fall back to defaults.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

import tomli

from .blocks import LabelingOptions
from .flowsim import IntegratorOptions

ENV_VAR = "CONLEY_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    # equilibria at infinity
    hyperbolic_tol: float = 1e-8
    # boundary labeling
    flux_samples: int = 32
    tangency_tol: float = 1e-10
    probe_time: float = 1e-3
    grazing_tol: float = 1e-12
    # integrator
    step: float = 1e-2
    rtol: float = 1e-9
    atol: float = 1e-11
    max_step: float = 0.1
    chart_switch: float = 0.05
    norm_tol: float = 1e-8
    max_halvings: int = 20
    max_steps: int = 200_000
    # isolating families
    family_horizon: float = 50.0
    family_samples: int = 16
    family_lambdas: int = 16
    # portraits and probes
    portrait_grid: int = 8
    portrait_time: float = 20.0
    probe_horizon: float = 100.0
    probe_radius: float = 1e-2

    def integrator(self, **kw) -> IntegratorOptions:
        base = dict(step=self.step, rtol=self.rtol, atol=self.atol, max_step=self.max_step,
                    chart_switch=self.chart_switch, norm_tol=self.norm_tol,
                    max_halvings=self.max_halvings, max_steps=self.max_steps)
        base.update(kw)
        return IntegratorOptions(**base)

    def labeling(self) -> LabelingOptions:
        return LabelingOptions(samples=self.flux_samples, tangency_tol=self.tangency_tol,
                               probe_time=self.probe_time, grazing_tol=self.grazing_tol)

    def to_json(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, value):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = int if _TYPES[key] in (int, "int") else float
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{key}: expected a number")
    try:
        out = kind(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None
    if kind is int and isinstance(value, float) and value != int(value):
        raise ConfigError(f"{key}: expected an integer")
    return out


def parse_config_text(text: str, base: Config | None = None) -> Config:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return replace(base or Config(), **{k: _coerce(k, v) for k, v in data.items()})


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> Config:
    """Defaults, then the config file (explicit path or ``$CONLEY_CONFIG``), then overrides."""
    cfg = Config()
    path = path or os.environ.get(ENV_VAR)
    if path:
        with open(path, encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read(), cfg)
    if overrides:
        cfg = replace(cfg, **{k: _coerce(k, v) for k, v in overrides.items()})
    return cfg


def parse_override(item: str) -> tuple[str, str]:
    key, sep, value = item.partition("=")
    if not sep:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    return key.strip(), value.strip()
