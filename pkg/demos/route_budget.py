"""Plan routes that use up a battery budget as closely as possible.

Tighter budgets push the planner toward short routes; loose budgets make it
take detours through more waypoints."""

from auvplan import FoaParams, RouteBudget, generate_network, plan_route
from auvplan.graph import default_endpoints

g = generate_network(seed=1)
s, t = default_endpoints(g)
params = FoaParams(population_size=30, iterations=50, randomness_init=0.2, seed=0)

shortest, _ = plan_route(g, s, t, RouteBudget(1e6), params, objective="min_time")
print(f"fastest route: {len(shortest.edges)} edges, {shortest.total_time:.0f} s")

for budget in (5400.0, 7200.0, 10800.0):
    r, res = plan_route(g, s, t, RouteBudget(budget), params, forbid_overtime=True)
    print(f"budget {budget:6.0f} s: {len(r.edges):2d} edges, route time {r.total_time:7.1f} s, "
          f"slack {budget - r.total_time:6.1f} s")
