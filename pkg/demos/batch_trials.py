"""Run a short batch of missions on the default world and print aggregates."""

from auvplan.batch import run_batch
from auvplan.config import load_config

cfg = load_config(overrides={"batch": {"trials": 5}})
summary = run_batch(cfg)
for col in ("route_time", "remained", "replans"):
    agg = summary.aggregates[col]
    print(f"{col:>10}: mean {agg['mean']:9.2f}  std {agg['std']:8.2f}  "
          f"min {agg['min']:9.2f}  max {agg['max']:9.2f}")
print("failed trials:", summary.failed)
