"""Experiment configuration: a flat ``key = value`` text file.

Example::

    # kernel used by the demos
    mollifier = bump
    q = 1
    eps0 = 0.25
    ratio = 0.5
    count = 12
    a0 = 1.0
    levels = 4
    truncation = 256
    tests = default        # or: extended (adds a test function with psi(0) = 0)
    format = csv           # or: json
    seed = 20111
    samples = 1000

Lines starting with ``#`` or ``;`` are comments.  Every key is optional.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .asymptotics import EpsLadder
from .hilbert_scale import ScaleParams
from .mollify import KINDS

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    mollifier: str = "bump"
    q: int | None = None
    eps0: float = 0.25
    ratio: float = 0.5
    count: int = 12
    a0: float = 1.0
    levels: int = 4
    truncation: int = 256
    tests: str = "default"
    format: str = "csv"
    seed: int = 20111
    samples: int = 1000

    def __post_init__(self):
        if self.mollifier not in KINDS:
            raise ConfigError(f"mollifier must be one of {KINDS}")
        if self.tests not in ("default", "extended"):
            raise ConfigError("tests must be 'default' or 'extended'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.samples < 1:
            raise ConfigError("samples must be positive")
        try:
            self.ladder
            self.scale
        except (ValueError, IndexError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def ladder(self):
        return EpsLadder(self.eps0, self.ratio, self.count)

    @property
    def scale(self):
        return ScaleParams(self.a0, self.levels, self.truncation)

    def updated(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return replace(self, **changes)


_TYPES = {"q": int, "count": int, "levels": int, "truncation": int, "seed": int,
          "samples": int, "eps0": float, "ratio": float, "a0": float}


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for key, raw in parser["config"].items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        conv = _TYPES.get(key, str)
        try:
            values[key] = None if key == "q" and raw.lower() == "none" else conv(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
