"""Compiled path-cost kernel used inside the local planner's search loop.

Mirrors ``kinematic_states`` + ``path_cost`` for one sampled path without
building the intermediate state array. ``tests/test_localpath.py`` checks it
against the numpy reference.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _sample(grid_u, grid_v, ox, oy, dx, dy, x, y):
    nx, ny = grid_u.shape
    fx = (x - ox) / dx - 0.5
    fy = (y - oy) / dy - 0.5
    fx = min(max(fx, 0.0), nx - 1.0)
    fy = min(max(fy, 0.0), ny - 1.0)
    ix = min(int(math.floor(fx)), nx - 2)
    iy = min(int(math.floor(fy)), ny - 2)
    wx = fx - ix
    wy = fy - iy
    lo = grid_u[ix, iy] * (1.0 - wy) + grid_u[ix, iy + 1] * wy
    hi = grid_u[ix + 1, iy] * (1.0 - wy) + grid_u[ix + 1, iy + 1] * wy
    u = lo * (1.0 - wx) + hi * wx
    lo = grid_v[ix, iy] * (1.0 - wy) + grid_v[ix, iy + 1] * wy
    hi = grid_v[ix + 1, iy] * (1.0 - wy) + grid_v[ix + 1, iy + 1] * wy
    v = lo * (1.0 - wx) + hi * wx
    return u, v


@njit(cache=True)
def _wrap(a):
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@njit(cache=True)
def path_cost_kernel(pts, speed, has_field, grid_u, grid_v, ox, oy, dx, dy,
                     bounds, weights, rate_mode, body_frame):
    """Penalized cost of the path through sample points ``pts`` (n, 3).

    ``bounds`` = (surge_max, sway_min, sway_max, pitch_max, yaw_min, yaw_max).
    """
    n = pts.shape[0]
    total = 0.0
    surge = 0.0
    sway = 0.0
    pitch = 0.0
    yaw = 0.0
    prev_psi = 0.0
    prev_theta = 0.0
    prev_dt = 0.0
    for k in range(n - 1):
        ddx = pts[k + 1, 0] - pts[k, 0]
        ddy = pts[k + 1, 1] - pts[k, 1]
        ddz = pts[k + 1, 2] - pts[k, 2]
        seg = math.sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
        total += seg
        horiz = math.hypot(ddx, ddy)
        theta = math.atan2(-abs(ddz), horiz)
        psi = math.atan2(ddy, ddx)
        cu = 0.0
        cv = 0.0
        if has_field:
            cu, cv = _sample(grid_u, grid_v, ox, oy, dx, dy,
                             0.5 * (pts[k, 0] + pts[k + 1, 0]),
                             0.5 * (pts[k, 1] + pts[k + 1, 1]))
        ct = math.cos(theta)
        cp = math.cos(psi)
        sp = math.sin(psi)
        if body_frame:
            vx = speed * ct + cu * cp + cv * sp
            vy = cv * cp - cu * sp
        else:
            vx = speed * ct * cp + cu
            vy = speed * ct * sp + cv
        surge += max(0.0, vx - bounds[0])
        sway += max(0.0, vy - bounds[2]) + max(0.0, bounds[1] - vy)
        dt = seg / speed
        if rate_mode:
            if k > 0 and dt > 0.0 and prev_dt > 0.0:
                span = 0.5 * (dt + prev_dt)
                yr = math.degrees(_wrap(psi - prev_psi)) / span
                pr = math.degrees(theta - prev_theta) / span
                pitch += max(0.0, abs(pr) - bounds[3])
                yaw += max(0.0, yr - bounds[5]) + max(0.0, bounds[4] - yr)
        else:
            pdeg = math.degrees(psi)
            pitch += max(0.0, math.degrees(theta) - bounds[3])
            yaw += max(0.0, pdeg - bounds[5]) + max(0.0, bounds[4] - pdeg)
        prev_psi = psi
        prev_theta = theta
        prev_dt = dt
    time = total / speed
    return time + weights[0] * surge + weights[1] * sway + weights[2] * pitch + weights[3] * yaw


def field_arrays(field):
    """Arguments describing ``field`` (or its absence) for the kernel."""
    if field is None:
        z = np.zeros((2, 2))
        return False, z, z, 0.0, 0.0, 1.0, 1.0
    dx, dy = field.spacing
    return (True, np.ascontiguousarray(field.u), np.ascontiguousarray(field.v),
            float(field.origin[0]), float(field.origin[1]), float(dx), float(dy))
