"""Build a random vortex current field, sample it and check that it is
divergence-free up to discretization error."""

import numpy as np

from auvplan import generate_field, knots, sample_velocity
from auvplan.current import divergence

field = generate_field(seed=2)
speed = np.hypot(field.u, field.v)
print(f"{len(field.vortices)} vortices on a {field.u.shape} grid over {field.extent} m")
print(f"current speed: mean {speed.mean():.3f} m/s, max {speed.max():.3f} m/s "
      f"({speed.max() / knots(1.0):.2f} kt)")

for x, y in [(2000.0, 2000.0), (5000.0, 5000.0), (8000.0, 3000.0)]:
    s = sample_velocity(field, x, y)
    print(f"at ({x:.0f}, {y:.0f}): u = {s.v_cx:+.4f}, v = {s.v_cy:+.4f} m/s")

print(f"max |div| = {np.abs(divergence(field)).max():.2e} 1/s")
