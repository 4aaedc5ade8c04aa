"""Run configuration files (TOML) and ``section.key=value`` overrides.

A file either validates completely or nothing runs: unknown sections or
keys, wrong value types and out-of-range parameters are all rejected.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import CONTROLLER_KINDS, ControllerConfig, SimConfig
from .errors import ConfigError
from .plant import DisturbanceModel, PlantParams

OUTPUT_DIR_ENV = "SMCBENCH_OUT_DIR"


@dataclass(frozen=True)
class OutputOptions:
    dir: str = ""
    run_id: str = "run"


@dataclass(frozen=True)
class BenchmarkOptions:
    controllers: tuple = ("terminal", "energy_saving")


@dataclass(frozen=True)
class TuneOptions:
    beta1: Optional[float] = None
    grid: int = 21
    slack: float = 1.0
    j_hat_max: Optional[float] = None
    duration: float = 1.0
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    output: OutputOptions = field(default_factory=OutputOptions)
    benchmark: BenchmarkOptions = field(default_factory=BenchmarkOptions)
    tune: TuneOptions = field(default_factory=TuneOptions)

    def output_dir(self, override: Optional[str] = None) -> Path:
        chosen = override or self.output.dir or os.environ.get(OUTPUT_DIR_ENV) or "."
        return Path(chosen)


SECTIONS = {
    "plant": PlantParams,
    "controller": ControllerConfig,
    "simulation": SimConfig,
    "disturbance": DisturbanceModel,
    "output": OutputOptions,
    "benchmark": BenchmarkOptions,
    "tune": TuneOptions,
}
_NESTED = {"controller", "plant", "disturbance"}


def _scalar_fields(cls):
    return {f.name: f for f in dataclasses.fields(cls) if not (cls is SimConfig and f.name in _NESTED)}


def _coerce(section: str, key: str, value, default):
    where = f"{section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not (
            isinstance(value, int) or (isinstance(value, float) and value.is_integer())
        ):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(default, float) or default is None:
        if default is None and (value is None or (isinstance(value, str) and value.lower() == "none")):
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
            raise ConfigError(f"{where}: expected a list of strings, got {value!r}")
        return tuple(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string, got {value!r}")
    return value


def _check_keys(doc: dict) -> None:
    for section, body in doc.items():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        known = _scalar_fields(SECTIONS[section])
        for key in body:
            if key not in known:
                raise ConfigError(f"unknown key {section}.{key}")


def _build(cls, section: str, body: dict):
    defaults = cls()
    kwargs = {}
    for key, value in body.items():
        kwargs[key] = _coerce(section, key, value, getattr(defaults, key))
    return kwargs


def build_config(doc: dict) -> RunConfig:
    """Validate a parsed document and construct the run configuration."""
    _check_keys(doc)
    parts = {name: _build(SECTIONS[name], name, doc.get(name, {})) for name in SECTIONS}
    try:
        plant = PlantParams(**parts["plant"])
        controller = ControllerConfig(**parts["controller"])
        disturbance = DisturbanceModel(**parts["disturbance"])
        sim = SimConfig(controller=controller, plant=plant, disturbance=disturbance, **parts["simulation"])
        bench = BenchmarkOptions(**parts["benchmark"])
        tune = TuneOptions(**parts["tune"])
        output = OutputOptions(**parts["output"])
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    if len(bench.controllers) != 2 or any(k not in CONTROLLER_KINDS for k in bench.controllers):
        raise ConfigError(f"benchmark.controllers must name two of {', '.join(CONTROLLER_KINDS)}")
    if tune.grid < 3:
        raise ConfigError("tune.grid must be >= 3")
    return RunConfig(sim=sim, output=output, benchmark=bench, tune=tune)


def parse_override(item: str):
    """``section.key=value`` -> (section, key, value); values use TOML syntax,
    bare words fall back to strings."""
    path, sep, raw = item.partition("=")
    if not sep:
        raise ConfigError(f"override must look like section.key=value, got {item!r}")
    section, dot, key = path.strip().partition(".")
    if not dot or not section or not key:
        raise ConfigError(f"override key must be dotted (section.key), got {path!r}")
    raw = raw.strip()
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw
    return section, key, value


def apply_overrides(doc: dict, overrides) -> dict:
    merged = {name: dict(body) for name, body in doc.items()}
    for item in overrides or ():
        section, key, value = parse_override(item)
        merged.setdefault(section, {})[key] = value
    return merged


def load_document(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config not found: {path}")
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc


def load_config(path=None, overrides=()) -> RunConfig:
    doc = load_document(path) if path is not None else {}
    return build_config(apply_overrides(doc, overrides))


def dump_config(cfg: RunConfig) -> str:
    """Render a configuration back to TOML text (every field explicit)."""
    sim = cfg.sim
    tables = {
        "plant": sim.plant,
        "controller": sim.controller,
        "simulation": sim,
        "disturbance": sim.disturbance,
        "output": cfg.output,
        "benchmark": cfg.benchmark,
        "tune": cfg.tune,
    }
    lines = []
    for name, obj in tables.items():
        lines.append(f"[{name}]")
        for key in _scalar_fields(type(obj)):
            value = getattr(obj, key)
            if value is None:
                continue
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(f'"{v}"' for v in value) + "]"
    return f'"{value}"'
