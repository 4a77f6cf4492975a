"""
Mission execution: follow the planned route edge by edge, plan a local path
for every edge, and re-plan the rest of the route whenever a local path takes
longer than its edge's expected time.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .current import CurrentField
from .foa import FoaParams
from .graph import DEFAULT_CRUISE_SPEED, OperationGraph, edge_key
from .localpath import KinematicLimits, path_delay, plan_path
from .routing import NoFeasibleRoute, Route, RouteBudget, plan_route, route_cost

__all__ = [
    "MissionConfig",
    "EdgeRecord",
    "RouteRecord",
    "MissionLog",
    "MEASURED_FIELDS",
    "run_mission",
    "mission_cost",
    "save_mission",
]

COMPLETED = "completed"
TIMED_OUT = "timed out"
STRANDED = "stranded"

# wall-clock dependent entries of a serialized log
MEASURED_FIELDS = ("compute_times", "compute_time_total", "mission_cost",
                   "route_plan_wall", "path_plan_wall")


def _route_defaults():
    return FoaParams(population_size=20, iterations=50, attraction_base=1.0,
                     light_absorption=1.0, randomness_init=0.2, damping=0.97)


def _path_defaults():
    return FoaParams(population_size=20, iterations=100, attraction_base=1.0,
                     light_absorption=1.0, randomness_init=0.05, damping=0.97)


@dataclass(frozen=True)
class MissionConfig:
    """Settings of one mission.

    ``compute_time=None`` measures the wall-clock time of every re-plan;
    a number injects that fixed cost per re-plan instead.
    """

    battery_lifetime: float = 7200.0
    cruise_speed: float = DEFAULT_CRUISE_SPEED
    limits: KinematicLimits = field(default_factory=KinematicLimits)
    route_params: FoaParams = field(default_factory=_route_defaults)
    path_params: FoaParams = field(default_factory=_path_defaults)
    compute_time: Optional[float] = None
    seed: int = 0
    forbid_overtime: bool = True
    overtime_only: bool = False
    compute_drains_battery: bool = False
    n_ctrl: int = 5
    n_samples: int = 50
    window_margin: float = 0.25
    frame: str = "body"
    replan_tolerance: float = 1e-9

    def __post_init__(self):
        if not self.battery_lifetime > 0:
            raise ValueError("battery_lifetime must be > 0")
        if not self.cruise_speed > 0:
            raise ValueError("cruise_speed must be > 0")
        if self.compute_time is not None and self.compute_time < 0:
            raise ValueError("synthetic compute time must be >= 0")


@dataclass
class EdgeRecord:
    step: int
    edge: tuple
    from_node: int
    to_node: int
    expected_time: float
    path_time: float
    path_cost: float
    delay: float
    violations: list
    replan_triggered: bool
    path_plan_wall: float = 0.0


@dataclass
class RouteRecord:
    nodes: list
    expected_times: list
    total_time: float
    cost: float
    planned_at_step: int
    reason: str
    abandoned_at_step: Optional[int] = None
    route_plan_wall: float = 0.0


@dataclass
class MissionLog:
    battery_lifetime: float
    start: int
    target: int
    status: str = COMPLETED
    edges: list = field(default_factory=list)
    routes: list = field(default_factory=list)
    route_time: float = 0.0
    remained: float = 0.0
    replans: int = 0
    compute_times: list = field(default_factory=list)
    compute_time_total: float = 0.0
    mission_cost: float = 0.0
    diagnostics: dict = field(default_factory=dict)
    route_convergence: list = field(default_factory=list)
    path_convergence: list = field(default_factory=list)

    @property
    def nodes_visited(self) -> list:
        return [self.start] + [r.to_node for r in self.edges]

    def to_dict(self, include_convergence: bool = False) -> dict:
        d = asdict(self)
        for rec in d["edges"]:
            rec["edge"] = list(rec["edge"])
        if not include_convergence:
            d.pop("route_convergence")
            d.pop("path_convergence")
        return d


def _seed(base: int, tag: int, k: int) -> int:
    return int(np.random.SeedSequence([base, tag, k]).generate_state(1, dtype=np.uint64)[0] >> 1)


def mission_cost(log: MissionLog, battery_lifetime: Optional[float] = None) -> float:
    """Realized route cost plus the summed re-plan compute time.

    The route term scores the sum of realized per-edge path costs plus
    delays against the battery lifetime. Missions that did not reach the
    target additionally pay one battery lifetime.
    """
    budget = log.battery_lifetime if battery_lifetime is None else battery_lifetime
    realized = sum(r.path_cost + r.delay for r in log.edges)
    cost = route_cost(realized, budget) + sum(log.compute_times)
    if log.status != COMPLETED:
        cost += budget
    return cost


def run_mission(g: OperationGraph, field: Optional[CurrentField], start: int, target: int,
                cfg: MissionConfig = MissionConfig()) -> MissionLog:
    """Fly one mission from ``start`` to ``target``.

    The initial route is planned against the full battery lifetime. Every
    edge is then flown along its optimized local path and the remaining time
    is reduced by the path time. A path slower than the edge's expected time
    (beyond ``replan_tolerance``, relative) triggers a re-plan from the
    current node over the edges not yet used. Budget exhaustion before the
    target ends the mission as ``"timed out"``; a re-plan with no route left
    ends it as ``"stranded"``.
    """
    if start == target:
        raise ValueError("start and target must differ")
    log = MissionLog(cfg.battery_lifetime, start, target)
    remaining = float(cfg.battery_lifetime)
    visited: set = set()
    plans = 0

    def attempt(graph, node, objective):
        nonlocal plans
        params = replace(cfg.route_params, seed=_seed(cfg.seed, 0, plans))
        plans += 1
        budget = RouteBudget(cfg.battery_lifetime, min(max(remaining, 1e-9), cfg.battery_lifetime))
        route, res = plan_route(graph, node, target, budget, params,
                                objective=objective,
                                forbid_overtime=cfg.forbid_overtime and objective == "budget",
                                overtime_only=cfg.overtime_only)
        log.route_convergence.append(res.best_cost_history.tolist())
        return route

    def plan(node, step, reason):
        """Plan from ``node``; fall back to the fastest route. Returns (route, wall) or status."""
        graph = g.without_edges(visited) if visited else g
        t0 = time.perf_counter()
        route = None
        try:
            route = attempt(graph, node, "budget")
        except NoFeasibleRoute as exc:
            log.diagnostics.setdefault("infeasible_plans", []).append(
                {"step": step, "node": node, "reason": str(exc)})
        if route is None or route.total_time > remaining:
            try:
                fallback = attempt(graph, node, "min_time")
            except NoFeasibleRoute as exc:
                log.diagnostics["stranded"] = {"step": step, "node": node, "reason": str(exc)}
                return STRANDED, time.perf_counter() - t0
            if route is None or fallback.total_time < route.total_time:
                route, reason = fallback, reason + "+fallback"
            if route.total_time > remaining:
                log.diagnostics["timed_out"] = {
                    "step": step, "node": node, "fastest_route_time": route.total_time,
                    "remaining": remaining}
                return TIMED_OUT, time.perf_counter() - t0
        wall = time.perf_counter() - t0
        times = [g.edge(*e).expected_time for e in route.edges]
        log.routes.append(RouteRecord(list(route.nodes), times, route.total_time, route.cost,
                                      step, reason, route_plan_wall=wall))
        return route, wall

    outcome, _ = plan(start, 0, "initial")
    if isinstance(outcome, str):
        log.status = outcome
        return _finish(log, remaining, cfg)
    route: Route = outcome
    pos = 0
    cur = start
    step = 0
    while cur != target:
        a, b = route.nodes[pos], route.nodes[pos + 1]
        e = g.edge(a, b)
        params = replace(cfg.path_params, seed=_seed(cfg.seed, 1, step))
        t0 = time.perf_counter()
        path, res = plan_path(g.nodes[a].position, g.nodes[b].position, field, cfg.limits,
                              cfg.cruise_speed, params, n_ctrl=cfg.n_ctrl,
                              n_samples=cfg.n_samples, margin=cfg.window_margin, frame=cfg.frame)
        wall = time.perf_counter() - t0
        log.path_convergence.append(res.best_cost_history.tolist())
        remaining -= path.time
        visited.add(e.key)
        cur = b
        pos += 1
        overrun = path.time > e.expected_time * (1.0 + cfg.replan_tolerance)
        trigger = overrun and cur != target
        log.edges.append(EdgeRecord(step, edge_key(a, b), a, b, e.expected_time, path.time,
                                    path.cost, path_delay(path.time, e.expected_time),
                                    path.violations.tolist(), trigger, wall))
        step += 1
        if cur == target:
            break
        if remaining <= 0:
            log.status = TIMED_OUT
            log.diagnostics["timed_out"] = {"step": step, "node": cur, "remaining": remaining}
            break
        if trigger:
            log.routes[-1].abandoned_at_step = step
            outcome, wall = plan(cur, step, "replan")
            log.replans += 1
            spent = cfg.compute_time if cfg.compute_time is not None else wall
            log.compute_times.append(spent)
            if cfg.compute_drains_battery:
                remaining -= spent
            if isinstance(outcome, str):
                log.status = outcome
                break
            route, pos = outcome, 0
        elif sum(g.edge(*k).expected_time for k in route.edges[pos:]) > remaining:
            # the rest of the active route no longer fits: try the fastest way home once
            log.routes[-1].abandoned_at_step = step
            outcome, _ = plan(cur, step, "refit")
            if isinstance(outcome, str):
                log.status = outcome
                break
            route, pos = outcome, 0
    if cur == target and remaining < 0:
        log.status = TIMED_OUT
    return _finish(log, remaining, cfg)


def _finish(log: MissionLog, remaining: float, cfg: MissionConfig) -> MissionLog:
    log.remained = remaining
    log.route_time = float(sum(r.path_time for r in log.edges))
    log.compute_time_total = float(sum(log.compute_times))
    log.mission_cost = mission_cost(log, cfg.battery_lifetime)
    return log


def save_mission(log: MissionLog, out_dir, config: Optional[dict] = None, fmt: str = "csv"):
    """Write ``mission.json``, the per-edge trace and the optimizer convergence tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"config": config, **log.to_dict()}
    (out / "mission.json").write_text(json.dumps(payload, indent=2) + "\n")
    edge_rows = [
        {"step": r.step, "from": r.from_node, "to": r.to_node, "expected_time": r.expected_time,
         "path_time": r.path_time, "path_cost": r.path_cost, "delay": r.delay,
         "replan_triggered": int(r.replan_triggered)}
        for r in log.edges
    ]
    route_rows = [{"plan": k, "iteration": t, "best_cost": c}
                  for k, hist in enumerate(log.route_convergence) for t, c in enumerate(hist)]
    path_rows = [{"edge_step": k, "iteration": t, "best_cost": c}
                 for k, hist in enumerate(log.path_convergence) for t, c in enumerate(hist)]
    write_table(out / "edges", edge_rows, config, fmt)
    write_table(out / "route_convergence", route_rows, config, fmt)
    write_table(out / "path_convergence", path_rows, config, fmt)
    return out


def write_table(stem: Path, rows: list, config: Optional[dict], fmt: str = "csv") -> Path:
    """Write ``rows`` (list of dicts) as ``stem.csv`` or ``stem.json``."""
    if fmt == "json":
        path = stem.with_suffix(".json")
        path.write_text(json.dumps({"config": config, "rows": rows}, indent=2) + "\n")
        return path
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    path = stem.with_suffix(".csv")
    with open(path, "w", newline="") as fh:
        fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        if rows:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return path
