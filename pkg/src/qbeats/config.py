"""Experiment configuration: YAML schema, presets, and validation.

A config file is a single YAML document; presets (octalin, dmb) ship as data
files carrying the published experimental constants and can be overlaid by a
user config.  Field values: hyperfine constants in mT (or gauss via
``hfc_G``), magnetic field in tesla, times in ns, ``.inf`` for infinite
relaxation times.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import math
from dataclasses import dataclass, field

import yaml

from .hamiltonians import NuclearGroup, SpinSystemSpec
from .postprocess import FluorescenceParams

PRESETS = ("octalin", "dmb")
NOISE_METHODS = ("none", "kraus", "per-gate", "echo-synthetic")
FIELD_REGIMES = ("zero", "high")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class HardwareModel:
    """Synthetic-hardware constants for the echo-based noise method."""

    T1_ns: float = 100_000.0
    T2_ns: float = 100_000.0
    identity_ns: float = 35.5
    u_circuit_ns: float = 300.0  # nominal on-device duration of the evolution block
    drift_phase_rate: tuple[float, float] = (0.0, 0.0)


@dataclass
class ExperimentConfig:
    """Resolved experiment description."""

    name: str
    groups: tuple[NuclearGroup, ...]
    g1: float
    g2: float
    field_B: float
    relaxation: dict            # regime -> (T1, T2)
    field_regime: str = "zero"
    initial_state: str = "mixed"
    noise_method: str = "kraus"
    time_grid: tuple[float, float, float] = (0.0, 100.0, 0.1)
    postprocess: FluorescenceParams | None = None
    hardware: HardwareModel = field(default_factory=HardwareModel)

    def spin_spec(self, regime: str | None = None) -> SpinSystemSpec:
        regime = regime or self.field_regime
        if regime not in FIELD_REGIMES:
            raise ConfigError(f"unknown field regime {regime!r}")
        T1, T2 = self.relaxation[regime]
        return SpinSystemSpec(
            groups=self.groups,
            g1=self.g1,
            g2=self.g2,
            field_B=self.field_B if regime == "high" else 0.0,
            T1=T1,
            T2=T2,
        )

    def canonical(self) -> dict:
        return {
            "name": self.name,
            "groups": [{"count": g.count, "hfc_mT": g.hfc_mT} for g in self.groups],
            "g1": self.g1,
            "g2": self.g2,
            "field_B": self.field_B,
            "relaxation": {k: list(v) for k, v in sorted(self.relaxation.items())},
            "field_regime": self.field_regime,
            "initial_state": self.initial_state,
            "noise_method": self.noise_method,
            "time_grid": list(self.time_grid),
            "postprocess": None if self.postprocess is None else [
                self.postprocess.theta, self.postprocess.tau_f,
                self.postprocess.t0, self.postprocess.t_g,
            ],
            "hardware": [self.hardware.T1_ns, self.hardware.T2_ns,
                         self.hardware.identity_ns, self.hardware.u_circuit_ns,
                         list(self.hardware.drift_phase_rate)],
        }

    def digest(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _require(cond: bool, where: str, message: str):
    if not cond:
        raise ConfigError(f"{where}: {message}")


def _float(raw, where: str) -> float:
    if isinstance(raw, str) and raw.strip() in (".inf", "inf", "infinity"):
        return math.inf
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {raw!r}") from None


def _parse_groups(raw, where: str) -> tuple[NuclearGroup, ...]:
    _require(isinstance(raw, list) and 1 <= len(raw) <= 2, where,
             "expected a list of one or two nuclear groups")
    out = []
    for i, g in enumerate(raw):
        spot = f"{where}[{i}]"
        _require(isinstance(g, dict), spot, "expected a mapping")
        count = g.get("count")
        _require(isinstance(count, int) and count >= 0, spot, "count must be an integer >= 0")
        if "hfc_mT" in g:
            hfc = _float(g["hfc_mT"], spot + ".hfc_mT")
        elif "hfc_G" in g:
            hfc = _float(g["hfc_G"], spot + ".hfc_G") * 0.1
        else:
            raise ConfigError(f"{spot}: missing hfc_mT (or hfc_G)")
        out.append(NuclearGroup(count, hfc))
    return tuple(out)


def parse_config(data: dict, name: str = "config") -> ExperimentConfig:
    _require(isinstance(data, dict), name, "top level must be a mapping")
    known = {"system", "field_regime", "initial_state", "noise_method", "time_grid",
             "postprocess", "hardware", "name"}
    for key in data:
        _require(key in known, f"{name}.{key}", "unknown key")
    system = data.get("system")
    _require(isinstance(system, dict), f"{name}.system", "missing system mapping")

    groups = _parse_groups(system.get("groups"), f"{name}.system.groups")
    g1 = _float(system.get("g1", 2.0028), f"{name}.system.g1")
    g2 = _float(system.get("g2", 2.0028), f"{name}.system.g2")
    field_B = _float(system.get("field_B", 0.0), f"{name}.system.field_B")

    relax_raw = system.get("relaxation", {})
    _require(isinstance(relax_raw, dict), f"{name}.system.relaxation", "expected a mapping")
    relaxation = {}
    for regime in FIELD_REGIMES:
        block = relax_raw.get(regime, {})
        _require(isinstance(block, dict), f"{name}.system.relaxation.{regime}",
                 "expected a mapping")
        T1 = _float(block.get("T1", math.inf), f"{name}.system.relaxation.{regime}.T1")
        T2 = _float(block.get("T2", math.inf), f"{name}.system.relaxation.{regime}.T2")
        relaxation[regime] = (T1, T2)

    regime = data.get("field_regime", "zero")
    _require(regime in FIELD_REGIMES, f"{name}.field_regime",
             f"must be one of {FIELD_REGIMES}")
    noise = data.get("noise_method", "kraus")
    _require(noise in NOISE_METHODS, f"{name}.noise_method",
             f"must be one of {NOISE_METHODS}")
    initial = str(data.get("initial_state", "mixed"))

    grid_raw = data.get("time_grid", {})
    _require(isinstance(grid_raw, dict), f"{name}.time_grid", "expected a mapping")
    grid = (
        _float(grid_raw.get("start", 0.0), f"{name}.time_grid.start"),
        _float(grid_raw.get("end", 100.0), f"{name}.time_grid.end"),
        _float(grid_raw.get("step", 0.1), f"{name}.time_grid.step"),
    )
    _require(grid[2] > 0, f"{name}.time_grid.step", "step must be positive")
    _require(grid[1] >= grid[0], f"{name}.time_grid.end", "end must be >= start")

    post = None
    if data.get("postprocess") is not None:
        p = data["postprocess"]
        _require(isinstance(p, dict), f"{name}.postprocess", "expected a mapping")
        try:
            post = FluorescenceParams(
                theta=_float(p.get("theta", 0.0), f"{name}.postprocess.theta"),
                tau_f=_float(p.get("tau_f", 1.2), f"{name}.postprocess.tau_f"),
                t0=_float(p.get("t0", 1.0), f"{name}.postprocess.t0"),
                t_g=_float(p.get("t_g", 1.0), f"{name}.postprocess.t_g"),
            )
        except ValueError as exc:
            raise ConfigError(f"{name}.postprocess: {exc}") from None

    hw_raw = data.get("hardware", {})
    _require(isinstance(hw_raw, dict), f"{name}.hardware", "expected a mapping")
    drift = hw_raw.get("drift_phase_rate", (0.0, 0.0))
    if isinstance(drift, (int, float)):
        drift = (float(drift), float(drift))
    hardware = HardwareModel(
        T1_ns=_float(hw_raw.get("T1_us", 100.0), f"{name}.hardware.T1_us") * 1000.0,
        T2_ns=_float(hw_raw.get("T2_us", 100.0), f"{name}.hardware.T2_us") * 1000.0,
        identity_ns=_float(hw_raw.get("identity_ns", 35.5), f"{name}.hardware.identity_ns"),
        u_circuit_ns=_float(hw_raw.get("u_circuit_ns", 300.0), f"{name}.hardware.u_circuit_ns"),
        drift_phase_rate=(float(drift[0]), float(drift[1])),
    )

    try:
        config = ExperimentConfig(
            name=str(data.get("name", name)),
            groups=groups, g1=g1, g2=g2, field_B=field_B,
            relaxation=relaxation, field_regime=regime, initial_state=initial,
            noise_method=noise, time_grid=grid, postprocess=post, hardware=hardware,
        )
        config.spin_spec(regime)  # triggers SpinSystemSpec validation
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    return config


def load_config_file(path: str) -> ExperimentConfig:
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, name=path)


def load_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    ref = importlib.resources.files("qbeats.data").joinpath(f"{name}.yaml")
    data = yaml.safe_load(ref.read_text())
    return parse_config(data, name=name)


def dump_config(config: ExperimentConfig) -> str:
    """YAML rendering of the resolved config (semantically round-trips)."""
    c = config.canonical()
    doc = {
        "name": c["name"],
        "system": {
            "groups": c["groups"],
            "g1": c["g1"],
            "g2": c["g2"],
            "field_B": c["field_B"],
            "relaxation": {
                k: {"T1": v[0], "T2": v[1]} for k, v in config.relaxation.items()
            },
        },
        "field_regime": config.field_regime,
        "initial_state": config.initial_state,
        "noise_method": config.noise_method,
        "time_grid": {"start": config.time_grid[0], "end": config.time_grid[1],
                      "step": config.time_grid[2]},
    }
    if config.postprocess is not None:
        doc["postprocess"] = {
            "theta": config.postprocess.theta, "tau_f": config.postprocess.tau_f,
            "t0": config.postprocess.t0, "t_g": config.postprocess.t_g,
        }
    doc["hardware"] = {
        "T1_us": config.hardware.T1_ns / 1000.0, "T2_us": config.hardware.T2_ns / 1000.0,
        "identity_ns": config.hardware.identity_ns,
        "u_circuit_ns": config.hardware.u_circuit_ns,
        "drift_phase_rate": list(config.hardware.drift_phase_rate),
    }
    return yaml.safe_dump(doc, sort_keys=False)
