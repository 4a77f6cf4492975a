"""World construction from config, and multi-trial mission batches."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .config import mission_config
from .current import generate_field
from .graph import OperationGraph, default_endpoints, generate_network
from .mission import COMPLETED, MissionLog, run_mission, write_table

__all__ = ["make_world", "endpoints", "BatchSummary", "summarize", "run_batch", "save_batch"]

ROW_COLUMNS = ("trial", "status", "route_time", "remained", "replans", "compute_time_total",
               "route_plan_wall", "path_plan_wall_mean", "n_edges", "mean_rel_deviation")
NUMERIC_COLUMNS = ROW_COLUMNS[2:]


def make_world(cfg: dict, offset: int = 0):
    """Graph and current field described by ``cfg`` (seeds shifted by ``offset``)."""
    gc, fc = cfg["graph"], cfg["field"]
    g = generate_network(int(gc["nodes"]), tuple(gc["bounds"]), int(gc["neighbors"]),
                         float(cfg["mission"]["cruise_speed"]), int(gc["seed"]) + offset)
    f = generate_field(int(fc["n_vortices"]), tuple(fc["grid_shape"]),
                       (float(gc["bounds"][0]), float(gc["bounds"][1])),
                       tuple(fc["strength_range"]), tuple(fc["core_range"]),
                       int(fc["seed"]) + offset)
    return g, f


def endpoints(cfg: dict, g: OperationGraph):
    start, target = default_endpoints(g)
    if cfg["graph"]["start"] is not None:
        start = int(cfg["graph"]["start"])
    if cfg["graph"]["target"] is not None:
        target = int(cfg["graph"]["target"])
    return start, target


def trial_row(trial: int, log: MissionLog) -> dict:
    rel = [abs(r.path_time - r.expected_time) / r.expected_time
           for r in log.edges if r.expected_time > 0]
    walls = [r.path_plan_wall for r in log.edges]
    return {
        "trial": trial,
        "status": log.status,
        "route_time": log.route_time,
        "remained": log.remained,
        "replans": log.replans,
        "compute_time_total": log.compute_time_total,
        "route_plan_wall": float(sum(r.route_plan_wall for r in log.routes)),
        "path_plan_wall_mean": float(np.mean(walls)) if walls else 0.0,
        "n_edges": len(log.edges),
        "mean_rel_deviation": float(np.mean(rel)) if rel else 0.0,
    }


@dataclass
class BatchSummary:
    rows: list
    edge_pairs: list
    aggregates: dict = field(default_factory=dict)
    logs: list = field(default_factory=list, repr=False)

    @property
    def failed(self) -> list:
        return [r["trial"] for r in self.rows if r["status"] != COMPLETED]


def summarize(rows: list) -> dict:
    """min / max / mean / population std of every numeric column."""
    out = {}
    for col in NUMERIC_COLUMNS:
        values = np.array([float(r[col]) for r in rows])
        out[col] = {"min": float(values.min()), "max": float(values.max()),
                    "mean": float(values.mean()), "std": float(values.std())}
    return out


def _run_trial(args):
    cfg, trial, shared = args
    stride = int(cfg["batch"]["seed_stride"])
    if shared is None:
        g, f = make_world(cfg, trial * stride)
    else:
        g, f = shared
    start, target = endpoints(cfg, g)
    mc = mission_config(cfg, seed=int(cfg["mission"]["seed"]) + trial * stride)
    return trial, run_mission(g, f, start, target, mc)


def run_batch(cfg: dict, world: Optional[tuple] = None) -> BatchSummary:
    """Run ``batch.trials`` missions with strided seeds.

    Trials share one world unless ``batch.fresh_world`` is set. Rows come
    back ordered by trial id.
    """
    n = int(cfg["batch"]["trials"])
    fresh = bool(cfg["batch"]["fresh_world"])
    shared = None if fresh else (world if world is not None else make_world(cfg))
    jobs = [(cfg, k, shared) for k in range(n)]
    workers = int(cfg["batch"]["workers"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, jobs))
    else:
        results = [_run_trial(job) for job in jobs]
    results.sort(key=lambda item: item[0])
    rows = [trial_row(k, log) for k, log in results]
    pairs = [{"trial": k, "step": r.step, "expected_time": r.expected_time, "path_time": r.path_time}
             for k, log in results for r in log.edges]
    return BatchSummary(rows, pairs, summarize(rows), [log for _, log in results])


def save_batch(summary: BatchSummary, out_dir, config: Optional[dict] = None, fmt: str = "csv"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(out / "batch_rows", summary.rows, config, fmt)
    write_table(out / "batch_edges", summary.edge_pairs, config, fmt)
    rel = [abs(p["path_time"] - p["expected_time"]) / p["expected_time"]
           for p in summary.edge_pairs if p["expected_time"] > 0]
    payload = {
        "config": config,
        "trials": len(summary.rows),
        "failed_trials": summary.failed,
        "aggregates": summary.aggregates,
        "mean_rel_edge_deviation": float(np.mean(rel)) if rel else 0.0,
    }
    (out / "batch_summary.json").write_text(json.dumps(payload, indent=2) + "\n")
    return out
