"""
Experiment configuration: one JSON document with flat sections, overridable
through ``PLANNER_<SECTION>_<KEY>`` environment variables and CLI flags.

Speeds may be written as plain numbers (m/s) or strings with a ``kt`` suffix.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import replace
from pathlib import Path
from typing import Mapping, Optional

from .foa import FoaParams
from .localpath import KinematicLimits
from .mission import MissionConfig, _path_defaults, _route_defaults
from .units import parse_speed

__all__ = ["ConfigError", "DEFAULTS", "load_config", "resolve", "apply_env", "mission_config"]


class ConfigError(ValueError):
    pass


def _foa_section(p: FoaParams) -> dict:
    return {k: getattr(p, k) for k in ("population_size", "iterations", "attraction_base",
                                       "light_absorption", "randomness_init", "damping")}


DEFAULTS = {
    "graph": {"nodes": 30, "bounds": [10000.0, 10000.0, 100.0], "neighbors": 4,
              "seed": 1, "start": None, "target": None},
    "field": {"n_vortices": 11, "grid_shape": [100, 100], "strength_range": [50.0, 500.0],
              "core_range": [200.0, 800.0], "seed": 2},
    "mission": {"battery_lifetime": 7200.0, "cruise_speed": "5.0 kt", "seed": 0,
                "synthetic_compute": None, "forbid_overtime": True, "overtime_only": False,
                "compute_drains_battery": False, "n_ctrl": 5, "n_samples": 50,
                "window_margin": 0.25, "frame": "body"},
    "limits": {"surge_max": "5.25 kt", "sway_min": "-0.97 kt", "sway_max": "0.97 kt",
               "pitch_rate_max": 20.0, "yaw_rate_min": -17.0, "yaw_rate_max": 17.0,
               "eps_surge": 100.0, "eps_sway": 100.0, "eps_pitch": 100.0, "eps_yaw": 100.0,
               "penalize": "rate"},
    "route_foa": _foa_section(_route_defaults()),
    "path_foa": _foa_section(_path_defaults()),
    "batch": {"trials": 25, "seed_stride": 1, "fresh_world": False, "workers": 1},
    "output": {"dir": "out", "format": "csv"},
}

_SPEED_KEYS = {("mission", "cruise_speed"), ("limits", "surge_max"),
               ("limits", "sway_min"), ("limits", "sway_max")}


def _merge(base: dict, override: Mapping) -> dict:
    out = copy.deepcopy(base)
    for section, values in override.items():
        if section not in out:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(values, Mapping):
            raise ConfigError(f"section {section!r} must be an object")
        for key, value in values.items():
            if key not in out[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            out[section][key] = value
    return out


def _parse_env_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_env(cfg: dict, environ: Optional[Mapping] = None) -> dict:
    """Apply ``PLANNER_<SECTION>_<KEY>`` overrides (values parsed as JSON when possible)."""
    environ = os.environ if environ is None else environ
    out = copy.deepcopy(cfg)
    sections = sorted(out, key=len, reverse=True)
    for name, text in environ.items():
        if not name.startswith("PLANNER_"):
            continue
        rest = name[len("PLANNER_"):].lower()
        for section in sections:
            if rest.startswith(section + "_"):
                key = rest[len(section) + 1:]
                if key not in out[section]:
                    raise ConfigError(f"environment override {name}: unknown key {section}.{key}")
                out[section][key] = _parse_env_value(text)
                break
        else:
            raise ConfigError(f"environment override {name}: unknown section")
    return out


def resolve(cfg: dict) -> dict:
    """Validate a merged config and convert speeds to m/s."""
    out = copy.deepcopy(cfg)
    try:
        for section, key in _SPEED_KEYS:
            out[section][key] = parse_speed(out[section][key])
        if int(out["batch"]["trials"]) < 1:
            raise ConfigError("batch.trials must be >= 1")
        if out["output"]["format"] not in ("csv", "json"):
            raise ConfigError("output.format must be 'csv' or 'json'")
        mission_config(out)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return out


def load_config(path=None, environ: Optional[Mapping] = None, overrides: Optional[Mapping] = None) -> dict:
    """Defaults <- JSON file <- environment <- explicit overrides, then :func:`resolve`."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            cfg = _merge(cfg, json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = apply_env(cfg, environ)
    if overrides:
        cfg = _merge(cfg, overrides)
    return resolve(cfg)


def mission_config(cfg: dict, seed: Optional[int] = None) -> MissionConfig:
    m = cfg["mission"]
    limits = KinematicLimits(**{k: (parse_speed(v) if ("limits", k) in _SPEED_KEYS else v)
                                for k, v in cfg["limits"].items()})
    route = replace(_route_defaults(), **cfg["route_foa"])
    path = replace(_path_defaults(), **cfg["path_foa"])
    return MissionConfig(
        battery_lifetime=float(m["battery_lifetime"]),
        cruise_speed=parse_speed(m["cruise_speed"]),
        limits=limits,
        route_params=route,
        path_params=path,
        compute_time=None if m["synthetic_compute"] is None else float(m["synthetic_compute"]),
        seed=int(m["seed"] if seed is None else seed),
        forbid_overtime=bool(m["forbid_overtime"]),
        overtime_only=bool(m["overtime_only"]),
        compute_drains_battery=bool(m["compute_drains_battery"]),
        n_ctrl=int(m["n_ctrl"]),
        n_samples=int(m["n_samples"]),
        window_margin=float(m["window_margin"]),
        frame=m["frame"],
    )
