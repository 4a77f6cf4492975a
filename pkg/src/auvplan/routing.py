"""
Firefly route planning on the operation network.

A candidate route is a vector of per-node priority keys in [0, 1]. It is
decoded greedily: from the current node, follow the unused incident edge whose
far node carries the highest key, until the target is reached or the walk gets
stuck. Routes are scored against the time budget with :func:`route_cost`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .foa import FoaParams, OptimizeResult, optimize
from .graph import OperationGraph, edge_key

__all__ = [
    "Route",
    "RouteBudget",
    "NoFeasibleRoute",
    "decode_route",
    "route_time",
    "route_cost",
    "plan_route",
    "route_to_dict",
    "save_route",
]

INFEASIBLE_PENALTY = 10.0
_INIT_DRAWS = 20


class NoFeasibleRoute(RuntimeError):
    """Raised when a planning run never decodes an admissible route."""

    def __init__(self, message, population_size=0, iterations=0, infeasible_fraction=1.0):
        super().__init__(
            f"{message} (population={population_size}, iterations={iterations}, "
            f"infeasible fraction={infeasible_fraction:.3f})")
        self.population_size = population_size
        self.iterations = iterations
        self.infeasible_fraction = infeasible_fraction


@dataclass(frozen=True)
class Route:
    nodes: tuple
    edges: tuple
    total_time: float = 0.0
    cost: float = float("nan")

    @property
    def start(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]


@dataclass(frozen=True)
class RouteBudget:
    battery_lifetime: float
    remaining: Optional[float] = None

    def __post_init__(self):
        if not self.battery_lifetime > 0:
            raise ValueError("battery_lifetime must be > 0")
        if self.remaining is None:
            object.__setattr__(self, "remaining", float(self.battery_lifetime))
        if not 0 <= self.remaining <= self.battery_lifetime:
            raise ValueError("remaining time must lie in [0, battery_lifetime]")


def decode_route(keys, g: OperationGraph, start: int, target: int) -> Optional[Route]:
    """Greedy priority-key walk from ``start`` to ``target``.

    Returns ``None`` when the walk reaches a node with no unused incident
    edge. Ties between keys go to the lowest node id. The walk stops the first
    time it reaches ``target``; nodes may be revisited, edges may not.
    """
    n = len(g.nodes)
    if not (0 <= start < n and 0 <= target < n):
        raise ValueError(f"invalid node ids start={start}, target={target}")
    if start == target:
        raise ValueError("start and target must differ")
    keys = np.asarray(keys, dtype=float)
    if keys.shape != (n,):
        raise ValueError(f"expected {n} keys, got shape {keys.shape}")
    key = keys.tolist()
    used = set()
    nodes = [start]
    cur = start
    for _ in range(len(g.edges)):
        pick = -1
        pick_node = -1
        for idx, other in g.neighbors[cur]:
            if idx in used:
                continue
            if pick < 0 or key[other] > key[pick_node] or (
                    key[other] == key[pick_node] and other < pick_node):
                pick, pick_node = idx, other
        if pick < 0:
            return None
        used.add(pick)
        nodes.append(pick_node)
        cur = pick_node
        if cur == target:
            edges = tuple(edge_key(a, b) for a, b in zip(nodes[:-1], nodes[1:]))
            total = sum(g.edges[g._index[e]].expected_time for e in edges)
            return Route(tuple(nodes), edges, total)
    return None


def route_time(route: Route, per_edge_times: Mapping) -> float:
    total = 0.0
    for e in route.edges:
        try:
            total += per_edge_times[edge_key(*e)]
        except KeyError:
            raise ValueError(f"no time given for edge {e}") from None
    return total


def route_cost(route_time_s: float, battery_lifetime: float, overtime_only: bool = False) -> float:
    """Budget-fit cost ``|T - Tb| * max(0, T / Tb)``.

    With ``overtime_only`` the multiplier becomes ``max(0, (T - Tb) / Tb)`` so
    that only overruns are penalized.
    """
    if not battery_lifetime > 0:
        raise ValueError(f"battery lifetime must be > 0, got {battery_lifetime}")
    if route_time_s < 0:
        raise ValueError("route time must be >= 0")
    gap = route_time_s - battery_lifetime
    if overtime_only:
        return abs(gap) * max(0.0, gap / battery_lifetime)
    return abs(gap) * max(0.0, route_time_s / battery_lifetime)


def plan_route(
    g: OperationGraph,
    start: int,
    target: int,
    budget: RouteBudget,
    params: FoaParams,
    per_edge_times: Optional[Mapping] = None,
    objective: str = "budget",
    forbid_overtime: bool = False,
    overtime_only: bool = False,
):
    """Search priority-key space for the route that best fits the budget.

    Parameters
    ----------
    g : OperationGraph
    start, target : int
    budget : RouteBudget
        The route is scored against ``budget.remaining``.
    params : FoaParams
    per_edge_times : mapping, optional
        Edge key -> traversal time. Defaults to the graph's expected times.
    objective : {"budget", "min_time"}
        ``"budget"`` minimizes :func:`route_cost`; ``"min_time"`` minimizes
        the route time itself.
    forbid_overtime : bool
        Treat routes longer than the remaining time as inadmissible.
    overtime_only : bool
        Use the overrun-only variant of :func:`route_cost`.

    Returns
    -------
    (Route, OptimizeResult)

    Raises
    ------
    NoFeasibleRoute
        If no admissible route was decoded during the whole run.
    """
    if objective not in ("budget", "min_time"):
        raise ValueError(f"unknown objective {objective!r}")
    limit = float(budget.remaining)
    if not limit > 0:
        raise ValueError("remaining budget must be > 0")
    times = g.expected_times() if per_edge_times is None else per_edge_times
    # no edge-simple route can outlast every edge in sequence, so this
    # bound keeps infeasible decodes strictly worse than any feasible one
    longest = sum(times.get(e.key, e.expected_time) for e in g.edges)
    worst = longest if objective == "min_time" else max(route_cost(longest, limit, overtime_only),
                                                        0.25 * limit)
    penalty = INFEASIBLE_PENALTY * max(limit, worst)
    stats = {"evals": 0, "bad": 0}

    def score(route):
        if route is None:
            return None
        t = route_time(route, times)
        if forbid_overtime and t > limit:
            return None
        if objective == "min_time":
            return t
        return route_cost(t, limit, overtime_only)

    def cost(keys):
        stats["evals"] += 1
        value = score(decode_route(keys, g, start, target))
        if value is None:
            stats["bad"] += 1
            return penalty
        return value

    rng = np.random.default_rng(params.seed)
    dim = len(g.nodes)
    population = []
    for _ in range(params.population_size):
        for _ in range(_INIT_DRAWS):
            keys = rng.random(dim)
            if score(decode_route(keys, g, start, target)) is not None:
                break
        population.append(keys)

    # the optimizer draws its own noise stream; offset it from the init stream
    run_params = replace(params, seed=int(rng.integers(2**63 - 1)))
    result: OptimizeResult = optimize(cost, population, run_params, bounds=(0.0, 1.0))

    route = decode_route(result.best.position, g, start, target)
    if score(route) is None:
        frac = stats["bad"] / max(stats["evals"], 1)
        raise NoFeasibleRoute(f"no feasible route from {start} to {target}",
                              params.population_size, params.iterations, frac)
    t = route_time(route, times)
    route = replace(route, total_time=t, cost=route_cost(t, limit, overtime_only))
    return route, result


def route_to_dict(route: Route, per_edge_times: Optional[Mapping] = None) -> dict:
    times = per_edge_times or {}
    return {
        "nodes": list(route.nodes),
        "edges": [list(e) for e in route.edges],
        "expected_times": [times.get(tuple(e)) for e in route.edges] if times else None,
        "total_time": route.total_time,
        "cost": route.cost,
    }


def save_route(route: Route, path, per_edge_times=None, config=None):
    payload = {"config": config, **route_to_dict(route, per_edge_times)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    return Path(path)
