"""A mission where a current patch delays one edge enough to force a re-plan.

The budget fits the planned route 0-1-2-3 with little slack. Edge 1-2 runs
through a strong current patch, so at node 2 the vehicle re-plans over the edges it has
not used yet."""

import numpy as np

from auvplan import CurrentField, MissionConfig, OperationGraph, run_mission

g = OperationGraph.from_positions(
    [(1000, 5000, 50), (3000, 5000, 50), (5000, 6000, 50), (7000, 5000, 50), (6000, 8000, 50)],
    [(0, 1), (1, 2), (2, 3), (1, 3), (2, 4), (4, 3)], bounds=(10000.0, 10000.0, 100.0))
xs, ys = CurrentField.zeros().cell_centres()
X, Y = np.meshgrid(xs, ys, indexing="ij")
patch = (np.abs(X - 4000) < 250) & (np.abs(Y - 5500) < 250)
# the patch pushes along edge 1-2, so its straight path breaks the surge limit
field = CurrentField(np.where(patch, 0.9, 0.0), np.where(patch, 0.45, 0.0), (10000.0, 10000.0))

budget = sum(g.edge(a, b).expected_time for a, b in [(0, 1), (1, 2), (2, 3)]) + 300.0
log = run_mission(g, field, 0, 3, MissionConfig(battery_lifetime=budget, compute_time=1.0))

for route in log.routes:
    print(f"route planned at step {route.planned_at_step}: {route.nodes}")
for r in log.edges:
    flag = "  <- re-plan" if r.replan_triggered else ""
    print(f"{r.from_node} -> {r.to_node}: expected {r.expected_time:7.1f} s, "
          f"flown {r.path_time:7.1f} s{flag}")
print(f"status {log.status}, re-plans {log.replans}, remaining {log.remained:.1f} s")
