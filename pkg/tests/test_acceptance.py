"""End-to-end acceptance checks. Each test prints one summary line; the
conftest hook adds a PASS/FAIL table at the end of the run."""

import json
import shutil
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from auvplan.cli import main
from auvplan.config import load_config, mission_config
from auvplan.current import Vortex, divergence, field_from_vortices, generate_field
from auvplan.foa import FoaParams, anneal_alpha
from auvplan.graph import DEFAULT_CRUISE_SPEED, default_endpoints, generate_network
from auvplan.localpath import KinematicLimits, evaluate_spline, kinematic_states, plan_path
from auvplan.mission import MEASURED_FIELDS, MissionConfig, run_mission
from auvplan.routing import RouteBudget, plan_route, route_cost

from conftest import detour_world

MEASURED_COLUMNS = set(MEASURED_FIELDS) | {"path_plan_wall_mean"}


def report(criterion, ok, detail):
    print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")


def test_criterion_01_budget_satisfaction(tmp_path):
    code = main(["run-batch", "--out", str(tmp_path)])
    summary = json.loads((tmp_path / "batch_summary.json").read_text())
    budget = summary["config"]["mission"]["battery_lifetime"]
    with open(tmp_path / "batch_rows.csv") as fh:
        lines = [line.rstrip("\n").split(",") for line in fh if not line.startswith("#")]
    header, rows = lines[0], [dict(zip(lines[0], r)) for r in lines[1:]]
    remained = np.array([float(r["remained"]) for r in rows])
    route_time = np.array([float(r["route_time"]) for r in rows])
    ratio = remained.mean() / budget
    ok = (code == 0 and len(rows) == 25 and budget == 7200.0
          and all(r["status"] == "completed" for r in rows)
          and remained.min() >= 0 and route_time.max() <= budget and ratio < 0.15)
    report(1, ok, f"{len(rows)} trials, min remaining {remained.min():.2f} s, "
                  f"max route time {route_time.max():.2f} s, mean remaining/T = {ratio:.4f}, "
                  f"mean |T_path - t_edge|/t_edge = {summary['mean_rel_edge_deviation']:.2e}")
    assert ok
    assert summary["mean_rel_edge_deviation"] < 0.25


def test_criterion_02_violation_decay():
    g = generate_network(seed=1)
    f = generate_field(seed=2)
    lim = KinematicLimits()
    assert lim.surge_max == pytest.approx(2.70, abs=0.005)
    assert lim.sway_max == pytest.approx(0.499, abs=0.001)
    clean = monotone = 0
    for seed in range(25):
        e = g.edges[(7 * seed) % len(g.edges)]
        params = FoaParams(population_size=20, iterations=100, randomness_init=0.05, seed=seed)
        # every initial firefly perturbed, so the population starts with violations to shed
        p, res = plan_path(g.nodes[e.i].position, g.nodes[e.j].position, f, lim,
                           DEFAULT_CRUISE_SPEED, params, seed_straight=False, init_spread=0.2)
        clean += bool(np.all(p.violations == 0))
        monotone += bool(np.all(np.diff(res.best_cost_history) <= 0))
    ok = clean >= 0.9 * 25 and monotone == 25
    report(2, ok, f"violation-free best path in {clean}/25 seeds, "
                  f"non-increasing history in {monotone}/25")
    assert ok


def _walk_costs(g, s, t, budget):
    costs = []

    def dfs(cur, used, acc):
        for e in g.edges:
            if e.key in used or cur not in e.key:
                continue
            nxt = e.other(cur)
            if nxt == t:
                costs.append(route_cost(acc + e.expected_time, budget))
            else:
                dfs(nxt, used | {e.key}, acc + e.expected_time)

    dfs(s, frozenset(), 0.0)
    return costs


def _max_walk_time(g, s, t):
    best = 0.0

    def dfs(cur, used, acc):
        nonlocal best
        for e in g.edges:
            if e.key in used or cur not in e.key:
                continue
            nxt = e.other(cur)
            if nxt == t:
                best = max(best, acc + e.expected_time)
            else:
                dfs(nxt, used | {e.key}, acc + e.expected_time)

    dfs(s, frozenset(), 0.0)
    return best


def test_criterion_03_route_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    exact = near = n = 0
    graph_seed = 0
    while n < 20:
        k = int(rng.integers(5, 8))
        g = generate_network(k=k, neighbors_per_node=2, bounds=(3000.0, 3000.0, 100.0),
                             seed=1000 + graph_seed)
        graph_seed += 1
        if len(g.edges) > 12:
            continue
        s, t = 0, k - 1
        budget = 0.7 * _max_walk_time(g, s, t)
        opt = min(_walk_costs(g, s, t, budget))
        r, _ = plan_route(g, s, t, RouteBudget(budget),
                          FoaParams(population_size=20, iterations=50, randomness_init=0.2, seed=n))
        exact += r.cost <= opt + 1e-9 * max(1.0, opt)
        near += r.cost <= 1.05 * opt + 1e-9
        n += 1
    elapsed = time.perf_counter() - t0
    ok = near >= 16 and exact >= 10 and elapsed < 60
    report(3, ok, f"within 5% of optimum {near}/20, optimal {exact}/20, {elapsed:.1f} s")
    assert ok


def test_criterion_04_kinematic_identity():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        pts = evaluate_spline(rng.uniform([0, 0, 0], [10000, 10000, 100], (7, 3)), 50)
        speed = rng.uniform(0.5, 4.0)
        s = kinematic_states(pts, speed, None)
        err = np.abs((s[:, 5] ** 2 + s[:, 6] ** 2 + s[:, 7] ** 2) / speed**2 - 1).max()
        worst = max(worst, err)
    ok = worst <= 1e-9
    report(4, ok, f"max relative error {worst:.2e}")
    assert ok


def test_criterion_05_field_physics():
    worst = 0.0
    for seed in range(10):
        worst = max(worst, float(np.abs(divergence(generate_field(seed=seed))).max()))
    a = Vortex(2500.0, 6000.0, 480.0, 220.0)
    b = Vortex(7000.0, 3500.0, -90.0, 750.0)
    fa, fb, fab = (field_from_vortices(v) for v in ([a], [b], [a, b]))
    linear = np.array_equal(fab.u, fa.u + fb.u) and np.array_equal(fab.v, fa.v + fb.v)
    ok = worst < 1e-3 and linear
    report(5, ok, f"max |div| {worst:.2e} 1/s over 10 fields, exact superposition: {linear}")
    assert ok


def test_criterion_06_spline_contracts():
    rng = np.random.default_rng(6)
    worst_end = 0.0
    worst_hull = -np.inf
    for _ in range(1000):
        m = int(rng.integers(5, 9))
        ctrl = rng.uniform(-1000, 1000, (m, 3))
        s = evaluate_spline(ctrl, 50)
        worst_end = max(worst_end, np.linalg.norm(s[0] - ctrl[0]), np.linalg.norm(s[-1] - ctrl[-1]))
        hull = ConvexHull(ctrl)
        # facet equations: normal . x + offset <= 0 inside
        worst_hull = max(worst_hull, float((s @ hull.equations[:, :3].T + hull.equations[:, 3]).max()))
    ok = worst_end < 1e-9 and worst_hull <= 1e-9
    report(6, ok, f"max endpoint error {worst_end:.2e} m, max hull excess {worst_hull:.2e} m")
    assert ok


def test_criterion_07_unit_checks():
    values = (route_cost(7200, 7200), route_cost(9000, 7200), route_cost(3600, 7200),
              anneal_alpha(FoaParams(randomness_init=1.0, damping=0.5), 3))
    ok = values == (0.0, 2250.0, 1800.0, 0.125)
    report(7, ok, f"route costs {values[:3]}, alpha_3 = {values[3]}")
    assert ok


def test_criterion_08_planning_time():
    cfg = load_config(environ={})
    mc = mission_config(cfg)
    assert mc.route_params.population_size <= 30 and mc.path_params.iterations <= 100
    assert mc.n_samples == 50
    g = generate_network(seed=1)
    f = generate_field(seed=2)
    s, t = default_endpoints(g)
    route_walls, path_walls = [], []
    for seed in range(3):
        t0 = time.perf_counter()
        r, _ = plan_route(g, s, t, RouteBudget(mc.battery_lifetime),
                          replace(mc.route_params, seed=seed),
                          forbid_overtime=True)
        route_walls.append(time.perf_counter() - t0)
    for a, b in zip(r.nodes[:-1], r.nodes[1:]):
        t0 = time.perf_counter()
        plan_path(g.nodes[a].position, g.nodes[b].position, f, mc.limits, mc.cruise_speed,
                  mc.path_params, n_samples=mc.n_samples)
        path_walls.append(time.perf_counter() - t0)
    ok = max(route_walls) < 10 and max(path_walls) < 10
    report(8, ok, f"plan_route max {max(route_walls):.2f} s over {len(route_walls)} calls, "
                  f"plan_path max {max(path_walls):.2f} s over {len(path_walls)} calls")
    assert ok


def test_criterion_09_replan_correctness():
    g, f, budget = detour_world()
    log = run_mission(g, f, 0, 3, MissionConfig(battery_lifetime=budget, compute_time=1.0))
    visited = {tuple(r.edge) for r in log.edges[:2]}
    new = log.routes[1] if len(log.routes) > 1 else None
    new_edges = set() if new is None else {tuple(sorted(p)) for p in zip(new.nodes[:-1], new.nodes[1:])}
    ok = (log.status == "completed" and log.replans == 1 and new is not None
          and [r.replan_triggered for r in log.edges] == [False, True, False]
          and new.nodes[0] == 2 and not new_edges & visited)
    report(9, ok, f"re-plans {log.replans}, routes {[r.nodes for r in log.routes]}, "
                  f"visited before re-plan {sorted(visited)}")
    assert ok


def _strip(obj):
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k not in MEASURED_COLUMNS}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


def _comparable(path):
    """File content with wall-clock entries removed; exact bytes otherwise."""
    data = path.read_bytes()
    if path.suffix == ".json":
        parsed = json.loads(data)
        return json.dumps(_strip(parsed), sort_keys=True).encode() if _strip(parsed) != parsed else data
    if path.suffix == ".csv":
        lines = data.decode().splitlines()
        body = [i for i, line in enumerate(lines) if not line.startswith("#")]
        if not body:
            return data
        header = lines[body[0]].split(",")
        keep = [j for j, name in enumerate(header) if name not in MEASURED_COLUMNS]
        if len(keep) == len(header):
            return data
        out = [line for line in lines if line.startswith("#")]
        for i in body:
            cells = lines[i].split(",")
            out.append(",".join(cells[j] for j in keep))
        return "\n".join(out).encode()
    return data


def test_criterion_10_determinism(tmp_path):
    commands = [
        ["gen-world"],
        ["plan-route"],
        ["plan-path"],
        ["run-mission", "--synthetic-compute", "1.5"],
        ["run-batch", "--trials", "2", "--synthetic-compute", "1.5"],
        ["run-mission", "--format", "json", "--synthetic-compute", "1.5", "--seed", "4"],
    ]
    mismatched = []
    n_files = 0
    for k, cmd in enumerate(commands):
        out = tmp_path / f"run{k}"
        assert main([*cmd, "--out", str(out)]) == 0
        first = tmp_path / f"first{k}"
        shutil.copytree(out, first)
        shutil.rmtree(out)
        assert main([*cmd, "--out", str(out)]) == 0
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in out.iterdir())
        for name in names:
            n_files += 1
            if _comparable(first / name) != _comparable(out / name):
                mismatched.append(f"{cmd[0]}:{name}")
    ok = not mismatched
    report(10, ok, f"{n_files} output files over {len(commands)} commands, mismatches: {mismatched}")
    assert ok
