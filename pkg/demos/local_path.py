"""Plan one local path through a strong vortex and compare it with the
straight line between the waypoints."""

import numpy as np

from auvplan import (FoaParams, KinematicLimits, Vortex, evaluate_spline, kinematic_states, knots,
                     path_cost, plan_path)
from auvplan.current import field_from_vortices

field = field_from_vortices([Vortex(5000.0, 5000.0, 3000.0, 300.0)])
start, end = np.array([3000.0, 5000.0, 20.0]), np.array([7000.0, 5000.0, 20.0])
limits = KinematicLimits()
speed = knots(5.0)

line = evaluate_spline(np.linspace(start, end, 7), 50)
straight = path_cost(kinematic_states(line, speed, field), limits, speed)
print(f"straight line: {straight.time:.1f} s, cost {straight.cost:.1f}, "
      f"violations {straight.violations.round(3)}")

params = FoaParams(population_size=20, iterations=100, randomness_init=0.05, seed=0)
p, res = plan_path(start, end, field, limits, speed, params)
print(f"optimized:     {p.time:.1f} s, cost {p.cost:.1f}, violations {p.violations.round(3)}, "
      f"max lateral offset {np.abs(p.positions[:, 1] - 5000).max():.0f} m")
print(f"best cost {res.best_cost_history[0]:.1f} -> {res.best_cost_history[-1]:.1f}")
