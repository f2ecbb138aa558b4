"""Scenario configuration: defaults, loading, validation and hashing."""
from __future__ import annotations

import copy
import hashlib
import json
import math
import os
from pathlib import Path

from .dynamics import SweepSchedule
from .errors import ConfigError
from .models import KINDS, ParametricModel

DEFAULT_CONFIG = {
    "model": {
        "kind": "crossing",
        "epsilon": 0.1,
        "h0": [0.0, 0.0, math.pi / 2, 0.0],
        "kick_bloch": [1.0, 0.0, 0.0],
    },
    "cycle": {"lambda_start": 0.0, "periods": 1.0, "samples": 401},
    "schedule": {
        "kind": "uniform",
        "total_time": 2000.0,
        "dt": 0.01,
        "half_width": 0.3,
        "rate_multiplier": 200.0,
        "kicks": 10000,
    },
    "initial_branch": "upper",
    "robustness": {"trials": 0, "amplitude": 0.05},
    "sweep": {"axis": "epsilon", "values": [0.02, 0.05, 0.1, 0.2, 0.5]},
    "output": {"dir": "out", "format": "csv", "stride": 100},
    "seed": 0,
}

SWEEP_AXES = ("epsilon", "rate", "samples")


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {prefix}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {prefix}{key!r} must be an object")
            out[key] = _merge(base[key], value, f"{prefix}{key}.")
        else:
            out[key] = value
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Defaults, updated by the JSON file at ``path`` and then ``overrides``."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be an object")
        cfg = _merge(cfg, user)
    if overrides:
        cfg = _merge(cfg, overrides)
    validate(cfg)
    return cfg


def _finite(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")
    return float(value)


def validate(cfg: dict) -> None:
    m = cfg["model"]
    if m["kind"] not in KINDS:
        raise ConfigError(f"model.kind must be one of {KINDS}")
    _finite(m["epsilon"], "model.epsilon")
    for i, x in enumerate(m["h0"]):
        _finite(x, f"model.h0[{i}]")
    for i, x in enumerate(m["kick_bloch"]):
        _finite(x, f"model.kick_bloch[{i}]")
    c = cfg["cycle"]
    _finite(c["lambda_start"], "cycle.lambda_start")
    if _finite(c["periods"], "cycle.periods") <= 0:
        raise ConfigError("cycle.periods must be positive")
    if not isinstance(c["samples"], int) or c["samples"] < 2:
        raise ConfigError("cycle.samples must be an integer >= 2")
    s = cfg["schedule"]
    if s["kind"] not in ("uniform", "diabatic_window"):
        raise ConfigError("schedule.kind must be 'uniform' or 'diabatic_window'")
    for key in ("total_time", "dt", "half_width", "rate_multiplier"):
        if _finite(s[key], f"schedule.{key}") <= 0:
            raise ConfigError(f"schedule.{key} must be positive")
    if not isinstance(s["kicks"], int) or s["kicks"] < 1:
        raise ConfigError("schedule.kicks must be a positive integer")
    if cfg["initial_branch"] not in ("upper", "lower"):
        raise ConfigError("initial_branch must be 'upper' or 'lower'")
    r = cfg["robustness"]
    if not isinstance(r["trials"], int) or r["trials"] < 0:
        raise ConfigError("robustness.trials must be a non-negative integer")
    _finite(r["amplitude"], "robustness.amplitude")
    sw = cfg["sweep"]
    if sw["axis"] not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}")
    if not isinstance(sw["values"], list) or len(sw["values"]) < 2:
        raise ConfigError("sweep.values needs at least 2 grid points")
    for i, x in enumerate(sw["values"]):
        _finite(x, f"sweep.values[{i}]")
    o = cfg["output"]
    if o["format"] not in ("csv", "json"):
        raise ConfigError("output.format must be 'csv' or 'json'")
    if not isinstance(o["stride"], int) or o["stride"] < 1:
        raise ConfigError("output.stride must be a positive integer")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0 or cfg["seed"] >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    try:
        build_model(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def dumps(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


def build_model(cfg: dict) -> ParametricModel:
    m = cfg["model"]
    return ParametricModel(m["kind"], float(m["epsilon"]), tuple(float(x) for x in m["h0"]),
                           tuple(float(x) for x in m["kick_bloch"]))


def lambda_range(cfg: dict) -> tuple[float, float]:
    start = float(cfg["cycle"]["lambda_start"])
    return start, start + float(cfg["cycle"]["periods"]) * 2 * math.pi


def build_schedule(cfg: dict) -> SweepSchedule:
    s = cfg["schedule"]
    lo, hi = lambda_range(cfg)
    try:
        if s["kind"] == "uniform":
            return SweepSchedule.uniform(s["total_time"], lo, hi)
        return SweepSchedule.diabatic_window(s["total_time"], s["half_width"], s["rate_multiplier"],
                                             lam_start=lo, lam_end=hi)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def prepare_output_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out
