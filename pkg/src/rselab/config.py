"""Strict scenario configuration.

A config is a YAML or JSON mapping::

    scenario: complementarity
    grid: {n: 256, length: 6.283185307179586}
    physics: {c: 1.0, hbar: 1.0, omega: 1.0}
    field: {kind: plane, k: 1.0, sigma: 0.5, amplitude: 1.0}
    run: {dt: null, steps: null, delta_t_probe: null, rho_min: null,
          seed: 0, tolerances: {hj: 1.0e-10}}
    output: {report_path: report.json, csv_dir: csv}

Every key except ``scenario`` is optional.  Unknown keys are rejected
before anything is computed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from dataclasses import field as dc_field
from pathlib import Path

import yaml

from .errors import ConfigError, IoError

FIELD_KINDS = ("plane", "standing", "gaussian", "gw_plane", "gw_gaussian")


@dataclass(frozen=True)
class GridConfig:
    n: int | None = None
    length: float | None = None


@dataclass(frozen=True)
class PhysicsConfig:
    c: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0


@dataclass(frozen=True)
class FieldConfig:
    kind: str | None = None
    k: float | None = None
    sigma: float | None = None
    amplitude: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    dt: float | None = None
    steps: int | None = None
    delta_t_probe: float | None = None
    rho_min: float | None = None
    seed: int = 0
    tolerances: dict = dc_field(default_factory=dict)


@dataclass(frozen=True)
class OutputConfig:
    report_path: str | None = None
    csv_dir: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    grid: GridConfig = dc_field(default_factory=GridConfig)
    physics: PhysicsConfig = dc_field(default_factory=PhysicsConfig)
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    run: RunConfig = dc_field(default_factory=RunConfig)
    output: OutputConfig = dc_field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return asdict(self)


SECTIONS = {
    "grid": GridConfig,
    "physics": PhysicsConfig,
    "field": FieldConfig,
    "run": RunConfig,
    "output": OutputConfig,
}

_INT_KEYS = {"n", "steps", "seed"}
_STR_KEYS = {"kind", "report_path", "csv_dir"}
_POSITIVE_KEYS = {"n", "length", "c", "hbar", "omega", "sigma", "dt", "steps",
                  "delta_t_probe", "rho_min"}


def _number(value, path, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer:
        if int(value) != value:
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {value!r}", path)
    return float(value)


def _parse_section(name, cls, raw):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping", name)
    allowed = {f.name for f in fields(cls)}
    for key in raw:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}", f"{name}.{key}")
    values = {}
    for key, value in raw.items():
        path = f"{name}.{key}"
        if value is None:
            continue
        if key == "tolerances":
            values[key] = _parse_tolerances(value, path)
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"expected a string, got {value!r}", path)
            values[key] = value
        else:
            num = _number(value, path, integer=key in _INT_KEYS)
            if key in _POSITIVE_KEYS and num <= 0:
                raise ConfigError(f"must be > 0, got {num!r}", path)
            values[key] = num
    if name == "field" and values.get("kind", FIELD_KINDS[0]) not in FIELD_KINDS:
        raise ConfigError(f"kind must be one of {FIELD_KINDS}", "field.kind")
    return cls(**values)


def _parse_tolerances(raw, path):
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping of check name -> tolerance", path)
    out = {}
    for key, value in raw.items():
        tol = _number(value, f"{path}.{key}")
        if tol <= 0:
            raise ConfigError(f"tolerance must be > 0, got {tol!r}", f"{path}.{key}")
        out[str(key)] = tol
    return out


def parse_config(raw) -> ScenarioConfig:
    """Validate a decoded mapping and build a ScenarioConfig."""
    from .scenarios import REGISTRY

    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    for key in raw:
        if key != "scenario" and key not in SECTIONS:
            raise ConfigError(f"unknown key {key!r}", str(key))
    name = raw.get("scenario")
    if not isinstance(name, str):
        raise ConfigError("missing or non-string scenario name", "scenario")
    if name not in REGISTRY:
        raise ConfigError(f"unknown scenario {name!r}; see `rselab list`", "scenario")
    sections = {sec: _parse_section(sec, cls, raw.get(sec)) for sec, cls in SECTIONS.items()}
    cfg = ScenarioConfig(scenario=name, **sections)
    REGISTRY[name].validate(cfg)
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_config(raw)


def with_output(cfg: ScenarioConfig, report_path=None, csv_dir=None) -> ScenarioConfig:
    out = cfg.output
    if report_path is not None:
        out = replace(out, report_path=str(report_path))
    if csv_dir is not None:
        out = replace(out, csv_dir=str(csv_dir))
    return replace(cfg, output=out)
