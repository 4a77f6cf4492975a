"""
Firefly optimizer over fixed-length real vectors.

Dimmer (higher cost) fireflies move toward brighter (lower cost) ones with an
attraction that decays with squared distance, plus an annealed random walk.
Both planners in this package run on top of :func:`optimize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "FoaParams",
    "Firefly",
    "OptimizeResult",
    "firefly_distance",
    "attraction",
    "attraction_step",
    "anneal_alpha",
    "optimize",
]


@dataclass(frozen=True)
class FoaParams:
    """Firefly optimizer settings.

    Parameters
    ----------
    population_size : int
        Number of fireflies (>= 2).
    iterations : int
        Number of sweeps over the population (>= 1).
    attraction_base : float
        Attraction at zero distance.
    light_absorption : float
        Decay rate of the attraction with squared distance.
    randomness_init : float
        Random-walk scale at the first iteration.
    damping : float
        Per-iteration decay of the random-walk scale, in (0, 1).
    seed : int
        Seed of the random stream driving the walk.
    """

    population_size: int = 20
    iterations: int = 100
    attraction_base: float = 1.0
    light_absorption: float = 1.0
    randomness_init: float = 0.2
    damping: float = 0.97
    seed: int = 0

    def __post_init__(self):
        if int(self.population_size) != self.population_size or self.population_size < 2:
            raise ValueError(f"population_size must be an integer >= 2, got {self.population_size}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be an integer >= 1, got {self.iterations}")
        for name in ("attraction_base", "light_absorption", "randomness_init"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must lie in (0, 1), got {self.damping}")


@dataclass
class Firefly:
    position: np.ndarray
    cost: float


@dataclass
class OptimizeResult:
    """Outcome of one optimizer run.

    ``best_cost_history[t]`` is the best cost seen up to the end of
    iteration ``t``; ``mean_cost_history`` tracks the population mean.
    """

    best: Firefly
    best_cost_history: np.ndarray
    evaluations: int
    mean_cost_history: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _as_vector(x) -> np.ndarray:
    return np.asarray(getattr(x, "position", x), dtype=float)


def firefly_distance(a, b) -> float:
    a = _as_vector(a)
    b = _as_vector(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(b - a))


def attraction(params: FoaParams, distance: float) -> float:
    """Attraction factor ``beta0 * exp(-gamma * d**2)``."""
    return params.attraction_base * math.exp(-params.light_absorption * distance * distance)


def anneal_alpha(params: FoaParams, t: int) -> float:
    """Random-walk scale at iteration ``t`` (``alpha0 * kappa**t``)."""
    if t < 0:
        raise ValueError("iteration index must be >= 0")
    return params.randomness_init * params.damping**t


def attraction_step(i, j, params: FoaParams, t: int, noise) -> np.ndarray:
    """Move firefly ``i`` toward the brighter firefly ``j``.

    ``i`` and ``j`` may be :class:`Firefly` instances or raw position
    vectors; ``noise`` is the random-walk draw for this move.
    """
    xi = _as_vector(i)
    xj = _as_vector(j)
    noise = np.asarray(noise, dtype=float)
    if xi.shape != xj.shape or xi.shape != noise.shape:
        raise ValueError(
            f"dimension mismatch: {xi.shape}, {xj.shape}, noise {noise.shape}")
    diff = xj - xi
    beta = params.attraction_base * math.exp(-params.light_absorption * float(diff @ diff))
    return xi + beta * diff + anneal_alpha(params, t) * noise


def optimize(
    cost_fn: Callable[[np.ndarray], float],
    init_population: Sequence,
    params: FoaParams,
    bounds: Optional[tuple] = None,
    callback: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> OptimizeResult:
    """Minimize ``cost_fn`` with the firefly algorithm.

    Each iteration ranks the population by cost, then sweeps every pair
    ``(i, j)`` with ``j`` ranked before ``i`` and moves the dimmer of the two
    toward the brighter one (ties move ``i``). Moves are applied in place and
    the moved firefly is re-evaluated straight away. The best position ever
    evaluated is kept.

    Parameters
    ----------
    cost_fn : callable
        Deterministic, nonnegative cost of a position vector.
    init_population : sequence of array_like
        Starting positions, all of the same dimension.
    params : FoaParams
        Optimizer settings. The population size is taken from
        ``init_population``.
    bounds : tuple of array_like, optional
        ``(lower, upper)`` box; positions are clamped into it after every move.
    callback : callable, optional
        Called as ``callback(t, positions, costs)`` after each iteration.

    Returns
    -------
    OptimizeResult
    """
    if len(init_population) == 0:
        raise ValueError("init_population is empty")
    pop = np.array([np.asarray(p, dtype=float) for p in init_population])
    if pop.ndim != 2:
        raise ValueError("population members must share one dimension")
    n, dim = pop.shape
    if bounds is not None:
        lower = np.broadcast_to(np.asarray(bounds[0], dtype=float), (dim,))
        upper = np.broadcast_to(np.asarray(bounds[1], dtype=float), (dim,))
        np.clip(pop, lower, upper, out=pop)

    def evaluate(x):
        c = float(cost_fn(x))
        if not math.isfinite(c):
            raise ValueError(f"non-finite cost {c} at position {x.tolist()}")
        return c

    rng = np.random.default_rng(params.seed)
    costs = np.array([evaluate(p) for p in pop])
    evaluations = n
    k = int(np.argmin(costs))
    best_pos, best_cost = pop[k].copy(), float(costs[k])

    history = np.empty(params.iterations)
    mean_history = np.empty(params.iterations)
    beta0, gamma = params.attraction_base, params.light_absorption
    n_pairs = n * (n - 1) // 2
    for t in range(params.iterations):
        order = np.argsort(costs, kind="stable")
        pop = pop[order]
        costs = costs[order]
        alpha = anneal_alpha(params, t)
        # one noise row per pair update, drawn in sweep order
        noise = rng.uniform(-0.5, 0.5, (n_pairs, dim))
        p = 0
        for i in range(n):
            for j in range(i):
                if costs[j] <= costs[i]:
                    mover, leader = i, j
                else:
                    mover, leader = j, i
                xm = pop[mover]
                diff = pop[leader] - xm
                beta = beta0 * math.exp(-gamma * float(diff @ diff))
                moved = xm + beta * diff + alpha * noise[p]
                p += 1
                if bounds is not None:
                    np.clip(moved, lower, upper, out=moved)
                pop[mover] = moved
                c = evaluate(moved)
                costs[mover] = c
                evaluations += 1
                if c < best_cost:
                    best_cost = c
                    best_pos = moved.copy()
        history[t] = best_cost
        mean_history[t] = float(costs.mean())
        if callback is not None:
            callback(t, pop, costs)

    return OptimizeResult(
        best=Firefly(best_pos, best_cost),
        best_cost_history=history,
        evaluations=evaluations,
        mean_cost_history=mean_history,
    )
