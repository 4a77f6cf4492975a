"""
Current-aware local path planning between two waypoints.

A path is a clamped uniform cubic B-spline whose interior control points are
placed by the firefly optimizer. Each sampled segment gets a kinematic state
(heading, pitch, surge/sway/heave velocities under the local current) and the
path is scored by its travel time plus weighted constraint violations.

State columns are ``X, Y, Z, psi, theta, v_x, v_y, v_z`` with angles in
radians. Roll and the body rotational rates are not modelled.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import BSpline

from ._kernels import field_arrays, path_cost_kernel
from .current import CurrentField, sample_components
from .foa import FoaParams, optimize
from .units import KNOT

__all__ = [
    "STATE_COLUMNS",
    "KinematicLimits",
    "ControlPolygon",
    "LocalPath",
    "PathCost",
    "evaluate_spline",
    "kinematic_states",
    "path_cost",
    "path_delay",
    "plan_path",
    "save_path",
]

STATE_COLUMNS = ("X", "Y", "Z", "psi", "theta", "v_x", "v_y", "v_z")


@dataclass(frozen=True)
class KinematicLimits:
    """Vehicle limits and penalty weights.

    Speeds in m/s, rates in deg/s. With ``penalize="angle"`` the pitch and
    yaw bounds are compared against the angles themselves (in degrees)
    instead of their rates of change.
    """

    surge_max: float = 5.25 * KNOT
    sway_min: float = -0.97 * KNOT
    sway_max: float = 0.97 * KNOT
    pitch_rate_max: float = 20.0
    yaw_rate_min: float = -17.0
    yaw_rate_max: float = 17.0
    eps_surge: float = 100.0
    eps_sway: float = 100.0
    eps_pitch: float = 100.0
    eps_yaw: float = 100.0
    penalize: str = "rate"

    def __post_init__(self):
        if not self.surge_max > 0:
            raise ValueError("surge_max must be > 0")
        if self.sway_min > self.sway_max:
            raise ValueError("sway bounds must be ordered")
        if self.yaw_rate_min > self.yaw_rate_max:
            raise ValueError("yaw bounds must be ordered")
        if self.pitch_rate_max < 0:
            raise ValueError("pitch_rate_max must be >= 0")
        if min(self.eps_surge, self.eps_sway, self.eps_pitch, self.eps_yaw) < 0:
            raise ValueError("penalty weights must be >= 0")
        if self.penalize not in ("rate", "angle"):
            raise ValueError(f"penalize must be 'rate' or 'angle', got {self.penalize!r}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.eps_surge, self.eps_sway, self.eps_pitch, self.eps_yaw])


@dataclass(frozen=True, eq=False)
class ControlPolygon:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("control polygon needs at least 2 points")
        object.__setattr__(self, "points", pts)

    @property
    def n_interior(self) -> int:
        return self.points.shape[0] - 2


class PathCost(NamedTuple):
    time: float
    cost: float
    violations: np.ndarray  # surge, sway, pitch, yaw


@dataclass(eq=False)
class LocalPath:
    states: np.ndarray
    control_points: np.ndarray
    time: float
    cost: float
    violations: np.ndarray
    extra: dict = field(default_factory=dict)

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, :3]

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.positions, axis=0), axis=1).sum())


@lru_cache(maxsize=64)
def _basis(n_ctrl: int, n_samples: int) -> np.ndarray:
    inner = np.linspace(0.0, 1.0, n_ctrl - 2)[1:-1]
    knots = np.r_[[0.0] * 4, inner, [1.0] * 4]
    u = np.linspace(0.0, 1.0, n_samples)
    basis = BSpline.design_matrix(u, knots, 3).toarray()
    basis.setflags(write=False)
    return basis


def _pad(points: np.ndarray) -> np.ndarray:
    pts = list(points)
    back = True
    while len(pts) < 4:
        if back:
            pts.insert(len(pts) - 1, pts[-1])
        else:
            pts.insert(1, pts[0])
        back = not back
    return np.asarray(pts)


def evaluate_spline(poly, n_samples: int = 50) -> np.ndarray:
    """Sample a clamped uniform cubic B-spline at ``n_samples`` uniform parameters.

    ``poly`` is a :class:`ControlPolygon` or an ``(m, 3)`` array. Fewer than
    four control points are padded by repeating the endpoints.
    """
    if n_samples < 2:
        raise ValueError(f"n_samples must be >= 2, got {n_samples}")
    pts = poly.points if isinstance(poly, ControlPolygon) else np.asarray(poly, dtype=float)
    pts = _pad(pts)
    return _basis(len(pts), int(n_samples)) @ pts


def kinematic_states(positions, cruise_speed: float, field: Optional[CurrentField] = None,
                     frame: str = "body") -> np.ndarray:
    """Kinematic state at every sample of a path.

    Each segment between consecutive samples gets its heading (four-quadrant)
    and pitch, and the current sampled at its midpoint. In the default
    ``"body"`` frame, ``v_x``/``v_y`` are surge and sway: the current is
    resolved along and across the segment heading and the vehicle's own
    speed contributes only to surge and heave. ``frame="world"`` returns
    north/east style components instead. Sample ``i`` carries the state of
    the segment leaving it; the last sample repeats the final segment.
    """
    p = np.asarray(positions, dtype=float)
    if p.ndim != 2 or p.shape[0] < 2:
        raise ValueError("need at least 2 positions")
    d = np.diff(p, axis=0)
    horiz = np.hypot(d[:, 0], d[:, 1])
    theta = np.arctan2(-np.abs(d[:, 2]), horiz)
    psi = np.arctan2(d[:, 1], d[:, 0])
    if field is None:
        cu = cv = np.zeros(len(d))
    else:
        mid = 0.5 * (p[:-1] + p[1:])
        cu, cv = sample_components(field, mid[:, 0], mid[:, 1])
    cos_t = np.cos(theta)
    cos_p, sin_p = np.cos(psi), np.sin(psi)
    if frame == "body":
        vx = cruise_speed * cos_t + cu * cos_p + cv * sin_p
        vy = cv * cos_p - cu * sin_p
    elif frame == "world":
        vx = cruise_speed * cos_t * cos_p + cu
        vy = cruise_speed * cos_t * sin_p + cv
    else:
        raise ValueError(f"unknown frame {frame!r}")
    vz = cruise_speed * np.sin(theta)
    seg = np.column_stack([psi, theta, vx, vy, vz])
    return np.column_stack([p, np.vstack([seg, seg[-1:]])])


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


def path_cost(states, limits: KinematicLimits, cruise_speed: float) -> PathCost:
    """Travel time and penalized cost of a sampled path.

    Velocity violations are summed over the segment-owning samples (all but
    the last). Pitch and yaw rates are angle changes between consecutive
    segments divided by the mean of their durations.
    """
    s = np.asarray(states, dtype=float)
    if s.ndim != 2 or s.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    seg = np.linalg.norm(np.diff(s[:, :3], axis=0), axis=1)
    time = float(seg.sum()) / cruise_speed
    body = s[:-1]
    surge = np.maximum(0.0, body[:, 5] - limits.surge_max).sum()
    sway = (np.maximum(0.0, body[:, 6] - limits.sway_max)
            + np.maximum(0.0, limits.sway_min - body[:, 6])).sum()
    if limits.penalize == "rate":
        dt = seg / cruise_speed
        ok = (dt[:-1] > 0) & (dt[1:] > 0)
        span = np.where(ok, 0.5 * (dt[:-1] + dt[1:]), 1.0)
        yaw_rate = np.where(ok, np.degrees(_wrap(np.diff(body[:, 3]))) / span, 0.0)
        pitch_rate = np.where(ok, np.degrees(np.diff(body[:, 4])) / span, 0.0)
        pitch = np.maximum(0.0, np.abs(pitch_rate) - limits.pitch_rate_max).sum()
        yaw = (np.maximum(0.0, yaw_rate - limits.yaw_rate_max)
               + np.maximum(0.0, limits.yaw_rate_min - yaw_rate)).sum()
    else:
        psi_deg = np.degrees(body[:, 3])
        pitch = np.maximum(0.0, np.degrees(body[:, 4]) - limits.pitch_rate_max).sum()
        yaw = (np.maximum(0.0, psi_deg - limits.yaw_rate_max)
               + np.maximum(0.0, limits.yaw_rate_min - psi_deg)).sum()
    violations = np.array([surge, sway, pitch, yaw], dtype=float)
    return PathCost(time, time + float(limits.weights @ violations), violations)


def path_delay(path_time: float, expected_time: float) -> float:
    """Realized delay over the expected edge time, floored at zero."""
    return max(0.0, path_time - expected_time)


def plan_path(
    start,
    end,
    field: Optional[CurrentField],
    limits: KinematicLimits,
    cruise_speed: float,
    params: FoaParams,
    n_ctrl: int = 5,
    n_samples: int = 50,
    margin: float = 0.25,
    min_margin: float = 50.0,
    z_margin: float = 0.0,
    init_spread: float = 0.05,
    seed_straight: bool = True,
    track_violations: bool = False,
    frame: str = "body",
):
    """Optimize the interior control points of the path from ``start`` to ``end``.

    The search runs over control-point coordinates normalized to the local
    window: the bounding box of the two waypoints grown by
    ``max(margin * chord, min_margin)`` horizontally and ``z_margin``
    vertically. The initial population is the straight control polygon and
    Gaussian perturbations of it (``init_spread`` in window units); with
    ``seed_straight=False`` every member is perturbed.

    Returns
    -------
    (LocalPath, OptimizeResult)
        ``LocalPath.extra`` holds ``violation_history`` (population mean of
        the four violation sums per iteration) when ``track_violations`` is set.
    """
    a = np.asarray(start, dtype=float)
    b = np.asarray(end, dtype=float)
    chord = float(np.linalg.norm(b - a))
    if chord == 0.0:
        raise ValueError("start and end waypoints coincide")
    if n_ctrl < 1:
        raise ValueError("need at least one interior control point")
    pad = max(margin * chord, min_margin)
    lo = np.minimum(a, b) - np.array([pad, pad, z_margin])
    hi = np.maximum(a, b) + np.array([pad, pad, z_margin])
    span = hi - lo
    inv_span = np.divide(1.0, span, out=np.zeros(3), where=span > 0)

    frac = np.arange(1, n_ctrl + 1)[:, None] / (n_ctrl + 1)
    straight = a + frac * (b - a)
    u0 = ((straight - lo) * inv_span).ravel()
    basis = _basis(n_ctrl + 2, int(n_samples))

    buf = np.empty((n_ctrl + 2, 3))
    buf[0], buf[-1] = a, b

    def decode(u):
        np.multiply(u.reshape(n_ctrl, 3), span, out=buf[1:-1])
        buf[1:-1] += lo
        return buf

    def evaluate(u):
        pts = basis @ decode(u)
        return path_cost(kinematic_states(pts, cruise_speed, field, frame), limits, cruise_speed)

    kernel_field = field_arrays(field)
    bounds = np.array([limits.surge_max, limits.sway_min, limits.sway_max,
                       limits.pitch_rate_max, limits.yaw_rate_min, limits.yaw_rate_max])
    weights = limits.weights
    rate_mode = limits.penalize == "rate"
    body_frame = frame == "body"
    if frame not in ("body", "world"):
        raise ValueError(f"unknown frame {frame!r}")

    def cost(u):
        return path_cost_kernel(basis @ decode(u), cruise_speed, *kernel_field,
                                bounds, weights, rate_mode, body_frame)

    rng = np.random.default_rng(params.seed)
    population = []
    for k in range(params.population_size):
        if k == 0 and seed_straight:
            population.append(u0.copy())
        else:
            population.append(np.clip(u0 + rng.normal(0.0, init_spread, u0.shape), 0.0, 1.0))

    violation_history = []

    def track(t, pop, costs):
        violation_history.append(np.mean([evaluate(u).violations for u in pop], axis=0))

    run_params = replace(params, seed=int(rng.integers(2**63 - 1)))
    result = optimize(cost, population, run_params, bounds=(0.0, 1.0),
                      callback=track if track_violations else None)

    ctrl = decode(result.best.position).copy()
    states = kinematic_states(basis @ ctrl, cruise_speed, field, frame)
    pc = path_cost(states, limits, cruise_speed)
    extra = {}
    if track_violations:
        extra["violation_history"] = np.array(violation_history)
    return LocalPath(states, ctrl, pc.time, pc.cost, pc.violations, extra), result


def save_path(path: LocalPath, csv_path, json_path=None, config: Optional[dict] = None):
    """Write per-sample states as CSV and the cost summary as JSON."""
    csv_path = Path(csv_path)
    json_path = Path(json_path) if json_path is not None else csv_path.with_suffix(".json")
    with open(csv_path, "w", newline="") as fh:
        if config is not None:
            fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["index", *STATE_COLUMNS])
        for k, row in enumerate(path.states):
            writer.writerow([k, *(repr(float(x)) for x in row)])
    summary = {
        "config": config,
        "path_time": path.time,
        "path_cost": path.cost,
        "violations": dict(zip(("surge", "sway", "pitch", "yaw"), map(float, path.violations))),
        "length": path.length,
        "control_points": path.control_points.tolist(),
    }
    json_path.write_text(json.dumps(summary, indent=2) + "\n")
    return csv_path, json_path
