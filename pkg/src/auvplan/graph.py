"""
Operation network: waypoints scattered in a 3-D box joined by undirected,
length-weighted edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .units import KNOT

__all__ = [
    "DEFAULT_BOUNDS",
    "DEFAULT_CRUISE_SPEED",
    "Node",
    "Edge",
    "OperationGraph",
    "edge_length",
    "expected_edge_time",
    "generate_network",
    "default_endpoints",
    "save_graph",
    "load_graph",
]

DEFAULT_BOUNDS = (10000.0, 10000.0, 100.0)
# below the 5.25 kt surge limit so that a straight leg in still water is admissible
DEFAULT_CRUISE_SPEED = 5.0 * KNOT


@dataclass(frozen=True)
class Node:
    id: int
    position: tuple


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    length: float
    expected_time: float

    @property
    def key(self) -> tuple:
        return (self.i, self.j)

    def other(self, node: int) -> int:
        return self.j if node == self.i else self.i


def edge_key(a: int, b: int) -> tuple:
    return (a, b) if a < b else (b, a)


def edge_length(a, b) -> float:
    pa = np.asarray(getattr(a, "position", a), dtype=float)
    pb = np.asarray(getattr(b, "position", b), dtype=float)
    return float(np.linalg.norm(pb - pa))


def expected_edge_time(e, cruise_speed: float) -> float:
    """Traversal time at cruise speed with no delay. ``e`` is an Edge or a length."""
    if not cruise_speed > 0:
        raise ValueError(f"cruise_speed must be > 0, got {cruise_speed}")
    length = e.length if isinstance(e, Edge) else float(e)
    return length / cruise_speed


@dataclass(eq=False)
class OperationGraph:
    nodes: list
    edges: list
    bounds: tuple = DEFAULT_BOUNDS
    cruise_speed: float = DEFAULT_CRUISE_SPEED
    seed: Optional[int] = None
    adjacency: list = field(init=False, repr=False)

    def __post_init__(self):
        for k, node in enumerate(self.nodes):
            if node.id != k:
                raise ValueError("node ids must be contiguous from 0")
        self.adjacency = [[] for _ in self.nodes]
        self._index = {}
        for idx, e in enumerate(self.edges):
            if e.i == e.j:
                raise ValueError(f"self-loop at node {e.i}")
            if not e.i < e.j:
                raise ValueError(f"edge {e.key} must be stored with i < j")
            if e.key in self._index:
                raise ValueError(f"duplicate edge {e.key}")
            self._index[e.key] = idx
            self.adjacency[e.i].append(idx)
            self.adjacency[e.j].append(idx)
        # (edge index, far node) pairs for the route decoder's hot loop
        self.neighbors = [[(idx, self.edges[idx].other(n)) for idx in adj]
                          for n, adj in enumerate(self.adjacency)]

    @classmethod
    def from_positions(cls, positions, pairs: Iterable, cruise_speed=DEFAULT_CRUISE_SPEED,
                       bounds=None, seed=None) -> "OperationGraph":
        pts = np.asarray(positions, dtype=float)
        nodes = [Node(k, tuple(float(c) for c in p)) for k, p in enumerate(pts)]
        edges = []
        for a, b in sorted({edge_key(int(a), int(b)) for a, b in pairs}):
            length = edge_length(pts[a], pts[b])
            edges.append(Edge(a, b, length, expected_edge_time(length, cruise_speed)))
        if bounds is None:
            bounds = tuple(float(c) for c in pts.max(axis=0)) if len(pts) else DEFAULT_BOUNDS
        return cls(nodes, edges, tuple(bounds), cruise_speed, seed)

    @property
    def positions(self) -> np.ndarray:
        return np.array([n.position for n in self.nodes], dtype=float)

    def edge(self, a: int, b: int) -> Edge:
        return self.edges[self._index[edge_key(a, b)]]

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self._index

    def expected_times(self) -> dict:
        return {e.key: e.expected_time for e in self.edges}

    def is_connected(self) -> bool:
        return _n_components(len(self.nodes), [e.key for e in self.edges])[0] <= 1

    def without_edges(self, keys: Iterable) -> "OperationGraph":
        """Copy of the graph with the given edges removed (nodes kept)."""
        drop = {edge_key(*k) for k in keys}
        kept = [e for e in self.edges if e.key not in drop]
        return OperationGraph(self.nodes, kept, self.bounds, self.cruise_speed, self.seed)

    def validate(self):
        pts = self.positions
        lo = np.zeros(3)
        hi = np.asarray(self.bounds, dtype=float)
        if np.any(pts < lo) or np.any(pts > hi):
            raise ValueError("node outside the volume bounds")
        for e in self.edges:
            ref = edge_length(pts[e.i], pts[e.j])
            if abs(e.length - ref) > 1e-9 * max(ref, 1.0):
                raise ValueError(f"edge {e.key} length disagrees with its endpoints")
        if not self.is_connected():
            raise ValueError("graph is not connected")


def _n_components(n, pairs):
    if n == 0:
        return 0, np.zeros(0, dtype=int)
    if pairs:
        rows, cols = zip(*pairs)
    else:
        rows, cols = (), ()
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(adj, directed=False)


def generate_network(
    k: int = 30,
    bounds=DEFAULT_BOUNDS,
    neighbors_per_node: int = 4,
    cruise_speed: float = DEFAULT_CRUISE_SPEED,
    seed: int = 0,
) -> OperationGraph:
    """Random waypoint network.

    Nodes are uniform in ``[0, bounds]``. Each node links to its
    ``neighbors_per_node`` nearest nodes (union over both directions); the
    shortest link between two different components is then added until the
    graph is connected.
    """
    if k < 2:
        raise ValueError(f"need at least 2 nodes, got {k}")
    if neighbors_per_node < 1 or neighbors_per_node >= k:
        raise ValueError(f"neighbors_per_node must lie in [1, {k - 1}], got {neighbors_per_node}")
    if any(not b > 0 for b in bounds):
        raise ValueError(f"bounds must be positive, got {bounds}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(k, 3)) * np.asarray(bounds, dtype=float)

    _, idx = cKDTree(pts).query(pts, k=neighbors_per_node + 1)
    pairs = {edge_key(a, int(b)) for a in range(k) for b in idx[a, 1:]}

    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    while True:
        n_comp, labels = _n_components(k, sorted(pairs))
        if n_comp <= 1:
            break
        masked = np.where(labels[:, None] != labels[None, :], dist, np.inf)
        a, b = np.unravel_index(int(np.argmin(masked)), masked.shape)
        pairs.add(edge_key(int(a), int(b)))

    return OperationGraph.from_positions(pts, pairs, cruise_speed, tuple(map(float, bounds)), seed)


def default_endpoints(g: OperationGraph) -> tuple:
    """Nodes nearest to the minimum and the maximum corner of the volume."""
    pts = g.positions
    start = int(np.argmin(np.linalg.norm(pts, axis=1)))
    target = int(np.argmin(np.linalg.norm(pts - np.asarray(g.bounds, dtype=float), axis=1)))
    if start == target:
        target = int(np.argmax(np.linalg.norm(pts - pts[start], axis=1)))
    return start, target


def graph_to_dict(g: OperationGraph) -> dict:
    return {
        "seed": g.seed,
        "bounds": list(g.bounds),
        "cruise_speed": g.cruise_speed,
        "nodes": [{"id": n.id, "position": list(n.position)} for n in g.nodes],
        "edges": [{"i": e.i, "j": e.j, "length": e.length, "expected_time": e.expected_time}
                  for e in g.edges],
    }


def graph_from_dict(d: dict) -> OperationGraph:
    nodes = [Node(int(n["id"]), tuple(float(c) for c in n["position"])) for n in d["nodes"]]
    edges = [Edge(int(e["i"]), int(e["j"]), float(e["length"]), float(e["expected_time"]))
             for e in d["edges"]]
    return OperationGraph(nodes, edges, tuple(d["bounds"]), float(d["cruise_speed"]), d.get("seed"))


def save_graph(g: OperationGraph, path, config: Optional[dict] = None):
    payload = {"config": config, **graph_to_dict(g)}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
    return Path(path)


def load_graph(path) -> OperationGraph:
    return graph_from_dict(json.loads(Path(path).read_text()))
