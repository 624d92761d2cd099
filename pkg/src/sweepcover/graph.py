"""Metric graph core: distance matrices, paths, instances, validation.

Every solver in this package operates on a complete metric, stored as a
dense distance matrix.  Arbitrary edge-weighted input is embedded through
its shortest-path closure, so the triangle inequality can be assumed
everywhere downstream.  Vertices are integers 0..n-1 throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9


class GraphError(ValueError):
    """Structurally invalid graph, path, or instance input."""


class MetricGraph:
    """Complete symmetric nonnegative distance matrix with triangle inequality.

    Immutable after construction; the underlying array is marked read-only
    so instances can be shared freely between solvers.
    """

    __slots__ = ("dist", "normalized", "__weakref__")

    def __init__(self, dist, *, validate: bool = True) -> None:
        arr = np.array(dist, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise GraphError("distance matrix must be square and non-empty")
        if validate:
            _check_metric(arr)
        arr.setflags(write=False)
        self.dist = arr
        self.normalized = bool(arr.max() <= 1.0 + TOL)

    @property
    def n(self) -> int:
        return int(self.dist.shape[0])

    def distance(self, u: int, v: int) -> float:
        return float(self.dist[u, v])

    def __repr__(self) -> str:
        return f"MetricGraph(n={self.n}, normalized={self.normalized})"


def _check_metric(d: np.ndarray) -> None:
    n = d.shape[0]
    if np.any(d < -TOL):
        raise GraphError("negative distance entry")
    if np.any(np.abs(np.diag(d)) > TOL):
        raise GraphError("nonzero diagonal entry")
    if np.any(np.abs(d - d.T) > TOL):
        raise GraphError("distance matrix not symmetric")
    for k in range(n):
        if np.any(d > d[:, k : k + 1] + d[k : k + 1, :] + TOL):
            raise GraphError("triangle inequality violated")


def metric_closure(edges: Iterable[tuple[int, int, float]], n: int) -> MetricGraph:
    """Shortest-path closure of an undirected edge list on n vertices.

    Parallel edges keep the minimum weight; self loops are ignored.
    Raises GraphError for negative weights, out-of-range endpoints, or a
    disconnected graph.
    """
    if n < 1:
        raise GraphError("need at least one vertex")
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge endpoint out of range: ({u}, {v})")
        if w < 0:
            raise GraphError("negative edge weight")
        if u == v:
            continue
        if w < d[u, v]:
            d[u, v] = d[v, u] = w
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    if np.isinf(d).any():
        raise GraphError("graph not connected")
    return MetricGraph(d, validate=False)


def euclidean_graph(points: Sequence[Sequence[float]]) -> MetricGraph:
    """Pairwise Euclidean distances of a point list (any fixed dimension)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise GraphError("points must form a non-empty 2-d array")
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff * diff).sum(axis=-1))
    # Euclidean by construction, skip the O(n^3) recheck.
    return MetricGraph(d, validate=False)


def path_weight(g: MetricGraph, vertices: Sequence[int]) -> float:
    """Sum of consecutive distances along a simple vertex sequence."""
    verts = [int(v) for v in vertices]
    if not verts:
        raise GraphError("empty path")
    if any(not 0 <= v < g.n for v in verts):
        raise GraphError("path vertex out of range")
    if len(set(verts)) != len(verts):
        raise GraphError("not a simple path")
    if len(verts) == 1:
        return 0.0
    return float(np.sum(g.dist[verts[:-1], verts[1:]]))


@dataclass(frozen=True)
class Path:
    """Simple path given by its vertex sequence and stored total weight."""

    vertices: tuple[int, ...]
    weight: float

    @property
    def q(self) -> int:
        return len(self.vertices)

    @property
    def trivial(self) -> bool:
        return len(self.vertices) == 1


def make_path(g: MetricGraph, vertices: Sequence[int]) -> Path:
    verts = tuple(int(v) for v in vertices)
    return Path(verts, path_weight(g, verts))


@dataclass(frozen=True)
class PathSet:
    """Vertex-disjoint paths with stored aggregate counts.

    The stored m/spanned/cost fields are redundant by construction; they
    exist so that validate_pathset can detect tampered or inconsistent
    solutions.
    """

    paths: tuple[Path, ...]
    m: int
    spanned: int
    cost: float


def make_pathset(g: MetricGraph, vertex_lists: Sequence[Sequence[int]]) -> PathSet:
    paths = tuple(make_path(g, vl) for vl in vertex_lists)
    seen: set[int] = set()
    for p in paths:
        for v in p.vertices:
            if v in seen:
                raise GraphError(f"vertex {v} shared between paths")
            seen.add(v)
    return PathSet(
        paths=paths,
        m=len(paths),
        spanned=sum(p.q for p in paths),
        cost=float(sum(p.weight for p in paths)),
    )


def validate_pathset(g: MetricGraph, ps: PathSet) -> str | None:
    """Return None if ps is internally consistent, else the first violation."""
    if ps.m != len(ps.paths):
        return f"path count mismatch: m={ps.m} but {len(ps.paths)} paths"
    seen: dict[int, int] = {}
    for i, p in enumerate(ps.paths):
        verts = p.vertices
        if not verts:
            return f"path {i} is empty"
        if any(not 0 <= v < g.n for v in verts):
            return f"path {i} has a vertex out of range"
        if len(set(verts)) != len(verts):
            return f"path {i} repeats a vertex"
        for v in verts:
            if v in seen:
                return f"vertex {v} shared between paths {seen[v]} and {i}"
            seen[v] = i
        w = path_weight(g, verts)
        if abs(w - p.weight) > TOL:
            return f"cost mismatch on path {i}: stored {p.weight}, actual {w}"
    if ps.spanned != sum(p.q for p in ps.paths):
        return f"spanned mismatch: stored {ps.spanned}"
    total = float(sum(p.weight for p in ps.paths))
    if abs(total - ps.cost) > TOL:
        return f"cost mismatch: stored {ps.cost}, actual {total}"
    return None


@dataclass(frozen=True)
class BscInstance:
    """Sweep-coverage instance: metric of PoIs plus the sensor fleet.

    sensors may be 0 only for degenerate bound queries; the solvers demand
    at least one sensor.
    """

    graph: MetricGraph
    sensors: int
    speed: float
    period: float

    def __post_init__(self) -> None:
        if self.sensors < 0:
            raise GraphError("sensor count must be nonnegative")
        if not self.speed > 0:
            raise GraphError("speed must be positive")
        if not self.period > 0:
            raise GraphError("period must be positive")

    @property
    def budget(self) -> float:
        return self.sensors * self.speed * self.period


def normalize_graph(g: MetricGraph) -> tuple[MetricGraph, float]:
    """Scale distances into [0, 1]; returns (graph, applied divisor)."""
    w = float(g.dist.max())
    if w <= 1.0:
        return g, 1.0
    return MetricGraph(g.dist / w, validate=False), w


def normalize(g: MetricGraph, inst: BscInstance | None) -> tuple[MetricGraph, BscInstance | None]:
    """Rescale distances and sensor speed by the largest distance entry.

    Division by the maximum entry leaves every coverage ratio unchanged:
    the fraction of a path one sensor sweeps per period is invariant.
    Identity when the matrix is already within [0, 1].
    """
    g2, scale = normalize_graph(g)
    if scale == 1.0:
        return g, inst
    if inst is None:
        return g2, None
    inst2 = BscInstance(g2, inst.sensors, inst.speed / scale, inst.period)
    return g2, inst2


def parse_instance(data: dict) -> tuple[MetricGraph, BscInstance | None]:
    """Build a graph (and optional sweep instance) from the JSON schema.

    Accepted shapes: {"points": [[x, y], ...]} for Euclidean input, or
    {"edges": [[u, v, w], ...], "n": n} for an edge list embedded through
    its metric closure.  Optional keys sensors/speed/period attach fleet
    parameters.
    """
    if not isinstance(data, dict):
        raise GraphError("instance must be a JSON object")
    if "points" in data:
        g = euclidean_graph(data["points"])
    elif "edges" in data:
        if "n" not in data:
            raise GraphError("edge-list instance needs explicit 'n'")
        edges = [(int(u), int(v), float(w)) for u, v, w in data["edges"]]
        g = metric_closure(edges, int(data["n"]))
    else:
        raise GraphError("instance must contain 'points' or 'edges'")
    inst = None
    if "sensors" in data:
        inst = BscInstance(
            g,
            int(data["sensors"]),
            float(data.get("speed", 1.0)),
            float(data.get("period", 1.0)),
        )
    return g, inst


def load_instance(path: str) -> tuple[MetricGraph, BscInstance | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(json.load(fh))
