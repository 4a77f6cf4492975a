"""Command-line entry point: ``auvplan <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .batch import endpoints, make_world, run_batch, save_batch
from .config import ConfigError, load_config, mission_config
from .current import load_field, save_field
from .graph import load_graph, save_graph
from .localpath import plan_path, save_path
from .mission import COMPLETED, STRANDED, run_mission, save_mission, write_table
from .routing import NoFeasibleRoute, RouteBudget, plan_route, save_route

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STRANDED = 3
EXIT_TIMED_OUT = 4


def _overrides(args) -> dict:
    o: dict = {}

    def put(section, key, value):
        if value is not None:
            o.setdefault(section, {})[key] = value

    seed = getattr(args, "seed", None)
    put("graph", "seed", seed)
    put("field", "seed", seed)
    put("mission", "seed", seed)
    put("mission", "synthetic_compute", getattr(args, "synthetic_compute", None))
    put("batch", "trials", getattr(args, "trials", None))
    put("batch", "workers", getattr(args, "workers", None))
    if getattr(args, "fresh_world", False):
        put("batch", "fresh_world", True)
    put("output", "dir", getattr(args, "out", None))
    put("output", "format", getattr(args, "format", None))
    put("graph", "start", getattr(args, "start", None))
    put("graph", "target", getattr(args, "target", None))
    put("mission", "battery_lifetime", getattr(args, "battery", None))
    return o


def load_world(world_dir, cfg: dict):
    """Read ``graph.json`` + ``field.json`` from a directory and cross-check them."""
    world_dir = Path(world_dir)
    try:
        g = load_graph(world_dir / "graph.json")
        f = load_field(world_dir / "field.json")
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load world from {world_dir}: {exc}") from exc
    if not np.allclose(g.bounds[:2], f.extent, rtol=1e-12):
        raise ConfigError(f"world mismatch: graph bounds {g.bounds[:2]} vs field extent {f.extent}")
    if not np.isclose(g.cruise_speed, cfg["mission"]["cruise_speed"], rtol=1e-12):
        raise ConfigError(f"world mismatch: graph built for cruise speed {g.cruise_speed} m/s, "
                          f"config says {cfg['mission']['cruise_speed']} m/s")
    return g, f


def _world(args, cfg):
    if getattr(args, "world", None):
        return load_world(args.world, cfg)
    return make_world(cfg)


def cmd_gen_world(args, cfg) -> int:
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    g, f = make_world(cfg)
    save_graph(g, out / "graph.json", cfg)
    save_field(f, out / "field.json", out / "field.csv", cfg)
    print(f"wrote {out / 'graph.json'}, {out / 'field.json'}, {out / 'field.csv'}")
    return EXIT_OK


def _status_code(status: str) -> int:
    if status == COMPLETED:
        return EXIT_OK
    return EXIT_STRANDED if status == STRANDED else EXIT_TIMED_OUT


def cmd_run_mission(args, cfg) -> int:
    g, f = _world(args, cfg)
    start, target = endpoints(cfg, g)
    log = run_mission(g, f, start, target, mission_config(cfg))
    out = save_mission(log, cfg["output"]["dir"], cfg, cfg["output"]["format"])
    print(f"{log.status}: {len(log.edges)} edges, {log.replans} re-plans, "
          f"route time {log.route_time:.1f} s, remaining {log.remained:.1f} s -> {out}")
    return _status_code(log.status)


def cmd_run_batch(args, cfg) -> int:
    world = load_world(args.world, cfg) if getattr(args, "world", None) else None
    summary = run_batch(cfg, world)
    out = save_batch(summary, cfg["output"]["dir"], cfg, cfg["output"]["format"])
    agg = summary.aggregates
    print(f"{len(summary.rows)} trials, remaining mean {agg['remained']['mean']:.1f} s "
          f"(min {agg['remained']['min']:.1f}) -> {out}")
    if summary.failed:
        statuses = {r["status"] for r in summary.rows if r["status"] != COMPLETED}
        print(f"failed trials: {summary.failed} ({', '.join(sorted(statuses))})", file=sys.stderr)
        return EXIT_STRANDED if STRANDED in statuses else EXIT_TIMED_OUT
    return EXIT_OK


def cmd_plan_route(args, cfg) -> int:
    g, _ = _world(args, cfg)
    start, target = endpoints(cfg, g)
    mc = mission_config(cfg)
    budget = RouteBudget(mc.battery_lifetime)
    try:
        route, res = plan_route(g, start, target, budget, replace(mc.route_params, seed=mc.seed),
                                forbid_overtime=mc.forbid_overtime, overtime_only=mc.overtime_only)
    except NoFeasibleRoute as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_STRANDED
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    save_route(route, out / "route.json", g.expected_times(), cfg)
    write_table(out / "route_convergence",
                [{"iteration": t, "best_cost": c} for t, c in enumerate(res.best_cost_history.tolist())],
                cfg, cfg["output"]["format"])
    print(f"route {list(route.nodes)}: time {route.total_time:.1f} s, cost {route.cost:.3f}")
    return EXIT_OK


def _point(text):
    values = [float(v) for v in text.split(",")]
    if len(values) != 3:
        raise argparse.ArgumentTypeError("expected x,y,z")
    return values


def cmd_plan_path(args, cfg) -> int:
    g, f = _world(args, cfg)
    if args.from_point is not None and args.to_point is not None:
        a, b = args.from_point, args.to_point
    else:
        start, target = endpoints(cfg, g)
        a, b = g.nodes[start].position, g.nodes[target].position
    mc = mission_config(cfg)
    path, res = plan_path(a, b, f, mc.limits, mc.cruise_speed, replace(mc.path_params, seed=mc.seed),
                          n_ctrl=mc.n_ctrl, n_samples=mc.n_samples, margin=mc.window_margin,
                          track_violations=True, frame=mc.frame)
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    save_path(path, out / "path.csv", out / "path.json", cfg)
    hist = path.extra["violation_history"]
    rows = [{"iteration": t, "best_cost": float(res.best_cost_history[t]),
             "mean_cost": float(res.mean_cost_history[t]),
             "surge_violation": float(hist[t, 0]), "sway_violation": float(hist[t, 1]),
             "pitch_violation": float(hist[t, 2]), "yaw_violation": float(hist[t, 3])}
            for t in range(len(res.best_cost_history))]
    write_table(out / "path_convergence", rows, cfg, cfg["output"]["format"])
    print(f"path time {path.time:.1f} s, cost {path.cost:.3f}, violations {path.violations.tolist()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auvplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, world=True):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="seed for graph, field and mission")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), help="table format")
        if world:
            p.add_argument("--world", help="directory with graph.json and field.json")
        return p

    common(sub.add_parser("gen-world", help="generate graph and current field"), world=False)

    p = common(sub.add_parser("run-mission", help="run one mission"))
    p.add_argument("--synthetic-compute", type=float, metavar="SECONDS",
                   help="fixed re-plan compute time instead of measured wall-clock")
    p.add_argument("--start", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--battery", type=float, help="battery lifetime in seconds")

    p = common(sub.add_parser("run-batch", help="run a batch of missions"))
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--fresh-world", action="store_true", help="new world per trial")
    p.add_argument("--synthetic-compute", type=float, metavar="SECONDS")
    p.add_argument("--battery", type=float)

    p = common(sub.add_parser("plan-route", help="plan one route"))
    p.add_argument("--start", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--battery", type=float)

    p = common(sub.add_parser("plan-path", help="plan one local path"))
    p.add_argument("--from", dest="from_point", type=_point, help="x,y,z")
    p.add_argument("--to", dest="to_point", type=_point, help="x,y,z")
    return parser


COMMANDS = {
    "gen-world": cmd_gen_world,
    "run-mission": cmd_run_mission,
    "run-batch": cmd_run_batch,
    "plan-route": cmd_plan_route,
    "plan-path": cmd_plan_path,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=_overrides(args))
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
