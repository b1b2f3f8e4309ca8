"""Run configuration: an INI file with sections, overridable from the CLI."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields, replace

from .ensemble import FixedSource, RandomSetSource, SamplerParams
from .errors import ValidationError
from .model import ImpulseSpec, Microstate, WellModel

SECTIONS = {
    "well": ("hbar", "m", "q"),
    "microstate": ("a", "b", "c"),
    "impulse": ("F", "epsilon", "gamma", "T"),
    "ensemble": ("n", "seed", "source", "count", "set_seed", "a_min", "a_max", "rho", "on_error", "threads"),
    "trajectory": ("n_points", "n_cycles", "tau0"),
    "output": ("path", "format"),
}


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    m: float = 1.0
    q: float = 1.0
    a: float = 1.0
    b: float = 1.0
    c: float = 0.0
    F: float = 1.0
    epsilon: float = 0.1
    gamma: float = 0.0
    T: float = 1.0
    n: int = 100_000
    seed: int = 42
    source: str = "fixed"
    count: int = 20
    set_seed: int = 7
    a_min: float = 0.2
    a_max: float = 5.0
    rho: float = 0.95
    on_error: str = "abort"
    threads: int = 0
    n_points: int = 101
    n_cycles: int = 1
    tau0: float = 0.0
    path: str = ""
    format: str = "csv"

    def well(self) -> WellModel:
        return WellModel(self.hbar, self.m, self.q)

    def microstate(self) -> Microstate:
        return Microstate(self.a, self.b, self.c)

    def impulse(self) -> ImpulseSpec:
        return ImpulseSpec(self.F, self.epsilon, self.gamma, self.T)

    def sampler(self) -> SamplerParams:
        return SamplerParams(self.a_min, self.a_max, self.rho)

    def microstate_source(self):
        if self.source == "fixed":
            return FixedSource(self.microstate())
        if self.source == "random":
            return RandomSetSource(self.set_seed, self.count, self.sampler())
        raise ValidationError("source", f"must be 'fixed' or 'random', got {self.source!r}")

    def with_overrides(self, **values) -> RunConfig:
        return replace(self, **{k: v for k, v in values.items() if v is not None})


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    kind = _TYPES[name]
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
    except ValueError:
        raise ValidationError(name, f"cannot parse {raw!r} as {kind}") from None
    return raw


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValidationError("config", str(exc)) from None
    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ValidationError("config", f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SECTIONS[section]:
                raise ValidationError("config", f"unknown key {key!r} in [{section}]")
            values[key] = _coerce(key, raw.strip())
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: RunConfig) -> str:
    out = io.StringIO()
    for section, keys in SECTIONS.items():
        out.write(f"[{section}]\n")
        for key in keys:
            value = getattr(cfg, key)
            out.write(f"{key} = {value!r}\n" if isinstance(value, float) else f"{key} = {value}\n")
        out.write("\n")
    return out.getvalue()
