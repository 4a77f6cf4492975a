"""Minimize a shifted paraboloid with the firefly optimizer and watch the
best cost fall over the iterations."""

import numpy as np

from auvplan import FoaParams, optimize

target = np.array([3.0, -2.0, 1.5])


def cost(x):
    return float(np.sum((x - target) ** 2))


rng = np.random.default_rng(0)
population = rng.uniform(-10, 10, (20, 3))
params = FoaParams(population_size=20, iterations=60, light_absorption=0.1, seed=0)
res = optimize(cost, population, params, bounds=(-10, 10))

for t in (0, 9, 29, 59):
    print(f"iteration {t + 1:3d}: best cost {res.best_cost_history[t]:.3e}")
print("best position", np.round(res.best.position, 4), "target", target)
