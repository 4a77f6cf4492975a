"""
Static 2-D current maps built by superposing Lamb-Oseen vortices.

The map is stored on a regular grid of cell-centred samples and queried with
bilinear interpolation. The field has no vertical component and does not vary
with depth.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Vortex",
    "CurrentField",
    "CurrentSample",
    "vortex_velocity",
    "field_from_vortices",
    "generate_field",
    "sample_velocity",
    "sample_components",
    "divergence",
    "save_field",
    "load_field",
]


@dataclass(frozen=True)
class Vortex:
    x: float
    y: float
    circulation: float
    core_radius: float

    def __post_init__(self):
        if not self.core_radius > 0:
            raise ValueError(f"core_radius must be > 0, got {self.core_radius}")
        if not math.isfinite(self.circulation):
            raise ValueError("circulation must be finite")


@dataclass(frozen=True)
class CurrentSample:
    v_cx: float
    v_cy: float

    @property
    def magnitude(self) -> float:
        return math.hypot(self.v_cx, self.v_cy)

    @property
    def heading(self) -> float:
        return math.atan2(self.v_cy, self.v_cx)


@dataclass(frozen=True, eq=False)
class CurrentField:
    """Gridded current map.

    ``u[ix, iy]`` and ``v[ix, iy]`` are the x/y velocity components at the
    centre of cell ``(ix, iy)``, i.e. at
    ``origin + ((ix + 0.5) * dx, (iy + 0.5) * dy)``.
    """

    u: np.ndarray
    v: np.ndarray
    extent: tuple
    origin: tuple = (0.0, 0.0)
    vortices: tuple = ()
    seed: Optional[int] = None

    def __post_init__(self):
        if self.u.shape != self.v.shape or self.u.ndim != 2:
            raise ValueError("u and v must be 2-D arrays of equal shape")
        if min(self.u.shape) < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.u.shape}")
        if not (self.extent[0] > 0 and self.extent[1] > 0):
            raise ValueError(f"extent must be positive, got {self.extent}")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise ValueError("current field contains non-finite velocities")

    @property
    def shape(self) -> tuple:
        return self.u.shape

    @property
    def spacing(self) -> tuple:
        return (self.extent[0] / self.shape[0], self.extent[1] / self.shape[1])

    def cell_centres(self):
        dx, dy = self.spacing
        xs = self.origin[0] + (np.arange(self.shape[0]) + 0.5) * dx
        ys = self.origin[1] + (np.arange(self.shape[1]) + 0.5) * dy
        return xs, ys

    @classmethod
    def zeros(cls, shape=(100, 100), extent=(10000.0, 10000.0), origin=(0.0, 0.0)):
        return cls(np.zeros(shape), np.zeros(shape), tuple(extent), tuple(origin))


def vortex_velocity(vortex: Vortex, x, y):
    """Velocity induced by one vortex at ``(x, y)``.

    Tangential Lamb-Oseen profile
    ``v_theta = circulation / (2 pi r) * (1 - exp(-r**2 / (2 rc**2)))``,
    counter-clockwise for positive circulation, zero at the centre.
    Accepts scalars or arrays.
    """
    dx = np.asarray(x, dtype=float) - vortex.x
    dy = np.asarray(y, dtype=float) - vortex.y
    r2 = dx * dx + dy * dy
    # v_theta / r, with its finite limit at r = 0 being irrelevant (times r -> 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(
            r2 > 0.0,
            vortex.circulation / (2.0 * math.pi * r2)
            * -np.expm1(-r2 / (2.0 * vortex.core_radius**2)),
            0.0,
        )
    return -scale * dy, scale * dx


def field_from_vortices(
    vortices: Sequence[Vortex],
    grid_shape=(100, 100),
    extent=(10000.0, 10000.0),
    origin=(0.0, 0.0),
    seed: Optional[int] = None,
) -> CurrentField:
    """Superpose ``vortices`` on a cell-centred grid.

    Contributions are accumulated in list order starting from zero, so the
    grid of ``[A, B]`` equals the grid of ``[A]`` plus the grid of ``[B]``.
    """
    if not (extent[0] > 0 and extent[1] > 0):
        raise ValueError(f"extent must have positive area, got {extent}")
    nx, ny = grid_shape
    dx, dy = extent[0] / nx, extent[1] / ny
    xs = origin[0] + (np.arange(nx) + 0.5) * dx
    ys = origin[1] + (np.arange(ny) + 0.5) * dy
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    u = np.zeros((nx, ny))
    v = np.zeros((nx, ny))
    for vortex in vortices:
        du, dv = vortex_velocity(vortex, X, Y)
        u += du
        v += dv
    return CurrentField(u, v, (float(extent[0]), float(extent[1])),
                        (float(origin[0]), float(origin[1])), tuple(vortices), seed)


def generate_field(
    n_vortices: int = 11,
    grid_shape=(100, 100),
    extent=(10000.0, 10000.0),
    strength_range=(50.0, 500.0),
    core_range=(200.0, 800.0),
    seed: int = 0,
    origin=(0.0, 0.0),
) -> CurrentField:
    """Random vortex map.

    Vortex centres follow a Gaussian around the domain midpoint (standard
    deviation a quarter of the extent per axis, redrawn until inside the
    domain). Circulation magnitude and core radius are uniform in their
    ranges; the circulation sign is a fair coin.
    """
    if n_vortices < 0:
        raise ValueError("n_vortices must be >= 0")
    if not (extent[0] > 0 and extent[1] > 0):
        raise ValueError(f"extent must have positive area, got {extent}")
    if strength_range[0] > strength_range[1] or core_range[0] > core_range[1]:
        raise ValueError("ranges must be ordered (low, high)")
    rng = np.random.default_rng(seed)
    lo = np.asarray(origin, dtype=float)
    size = np.asarray(extent, dtype=float)
    mid = lo + size / 2
    vortices = []
    for _ in range(n_vortices):
        while True:
            c = rng.normal(mid, size / 4)
            if np.all(c >= lo) and np.all(c <= lo + size):
                break
        strength = rng.uniform(*strength_range)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        core = rng.uniform(*core_range)
        vortices.append(Vortex(float(c[0]), float(c[1]), sign * strength, core))
    return field_from_vortices(vortices, grid_shape, extent, origin, seed)


def _interp_weights(f: CurrentField, x, y):
    dx, dy = f.spacing
    nx, ny = f.shape
    fx = np.clip((np.asarray(x, dtype=float) - f.origin[0]) / dx - 0.5, 0.0, nx - 1)
    fy = np.clip((np.asarray(y, dtype=float) - f.origin[1]) / dy - 0.5, 0.0, ny - 1)
    ix = np.minimum(np.floor(fx).astype(int), nx - 2)
    iy = np.minimum(np.floor(fy).astype(int), ny - 2)
    return ix, iy, fx - ix, fy - iy


def sample_components(f: CurrentField, x, y):
    """Bilinearly interpolated ``(v_cx, v_cy)`` arrays at points ``(x, y)``.

    Points outside the grid of cell centres are clamped to the nearest edge.
    """
    ix, iy, wx, wy = _interp_weights(f, x, y)
    out = []
    for g in (f.u, f.v):
        lower = g[ix, iy] * (1.0 - wy) + g[ix, iy + 1] * wy
        upper = g[ix + 1, iy] * (1.0 - wy) + g[ix + 1, iy + 1] * wy
        out.append(lower * (1.0 - wx) + upper * wx)
    return out[0], out[1]


def sample_velocity(f: CurrentField, x: float, y: float) -> CurrentSample:
    u, v = sample_components(f, x, y)
    return CurrentSample(float(u), float(v))


def divergence(f: CurrentField) -> np.ndarray:
    """Central-difference divergence at interior grid points, in 1/s."""
    dx, dy = f.spacing
    dudx = (f.u[2:, 1:-1] - f.u[:-2, 1:-1]) / (2 * dx)
    dvdy = (f.v[1:-1, 2:] - f.v[1:-1, :-2]) / (2 * dy)
    return dudx + dvdy


def save_field(f: CurrentField, json_path, csv_path=None, config: Optional[dict] = None):
    """Write the JSON header and the CSV grid (x_index, y_index, v_cx, v_cy)."""
    json_path = Path(json_path)
    csv_path = Path(csv_path) if csv_path is not None else json_path.with_suffix(".csv")
    header = {
        "config": config,
        "grid_shape": list(f.shape),
        "extent": list(f.extent),
        "origin": list(f.origin),
        "seed": f.seed,
        "vortices": [
            {"x": vx.x, "y": vx.y, "circulation": vx.circulation, "core_radius": vx.core_radius}
            for vx in f.vortices
        ],
        "csv": csv_path.name,
    }
    json_path.write_text(json.dumps(header, indent=2) + "\n")
    with open(csv_path, "w", newline="") as fh:
        if config is not None:
            fh.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["x_index", "y_index", "v_cx", "v_cy"])
        nx, ny = f.shape
        for ix in range(nx):
            for iy in range(ny):
                writer.writerow([ix, iy, repr(float(f.u[ix, iy])), repr(float(f.v[ix, iy]))])
    return json_path, csv_path


def load_field(json_path, csv_path=None) -> CurrentField:
    json_path = Path(json_path)
    header = json.loads(json_path.read_text())
    if csv_path is None:
        csv_path = json_path.parent / header["csv"]
    nx, ny = header["grid_shape"]
    u = np.full((nx, ny), np.nan)
    v = np.full((nx, ny), np.nan)
    count = 0
    with open(csv_path, newline="") as fh:
        rows = csv.reader(line for line in fh if not line.startswith("#"))
        next(rows)
        for row in rows:
            ix, iy = int(row[0]), int(row[1])
            if not (0 <= ix < nx and 0 <= iy < ny):
                raise ValueError(f"cell ({ix}, {iy}) outside grid shape {(nx, ny)}")
            u[ix, iy] = float(row[2])
            v[ix, iy] = float(row[3])
            count += 1
    if count != nx * ny or np.isnan(u).any():
        raise ValueError(f"field CSV has {count} cells, header declares {nx * ny}")
    vortices = tuple(Vortex(d["x"], d["y"], d["circulation"], d["core_radius"])
                     for d in header["vortices"])
    return CurrentField(u, v, tuple(header["extent"]), tuple(header["origin"]),
                        vortices, header["seed"])
