"""Generate the waypoint network and list its shortest and longest edges."""

import numpy as np

from auvplan import generate_network
from auvplan.graph import default_endpoints

g = generate_network(seed=1)
times = np.array([e.expected_time for e in g.edges])
s, t = default_endpoints(g)
print(f"{len(g.nodes)} nodes, {len(g.edges)} edges, start {s}, target {t}")
print(f"edge times: min {times.min():.0f} s, median {np.median(times):.0f} s, "
      f"max {times.max():.0f} s, total {times.sum():.0f} s")
for e in sorted(g.edges, key=lambda e: e.expected_time)[:3]:
    print(f"  short edge {e.key}: {e.length:.0f} m, {e.expected_time:.0f} s")
