"""Shared brute forces and random generators for the test suite.

Everything here is deliberately naive: exhaustive enumeration over tiny
search spaces, used as ground truth against the real solvers.
"""
from __future__ import annotations

import itertools

import numpy as np

from sweepcover.graph import MetricGraph, euclidean_graph, metric_closure
from sweepcover.prize_collecting import Tree


def brute_line(positions, window: float, sensors: int) -> int:
    """Best coverage with <= sensors intervals; left ends restricted to points.

    Shifting any interval left until it touches its leftmost covered
    point never loses coverage, so this restriction is exact.
    """
    best = 0
    q = len(positions)
    for r in range(0, min(sensors, q) + 1):
        for starts in itertools.combinations(positions, r):
            cov = sum(1 for x in positions if any(s <= x <= s + window for s in starts))
            best = max(best, cov)
    return best


def brute_alloc(rows, total: int) -> tuple[int, tuple[int, ...]]:
    """Exhaustive sensor split over paths; returns (best covered, split)."""
    best = -1
    arg: tuple[int, ...] = ()
    for combo in itertools.product(range(total + 1), repeat=len(rows)):
        if sum(combo) > total:
            continue
        v = sum(r[min(c, len(r) - 1)] for r, c in zip(rows, combo))
        if v > best:
            best, arg = v, tuple(combo)
    return best, arg


def random_euclidean(rng: np.random.Generator, n: int) -> MetricGraph:
    pts = np.round(rng.uniform(0.0, 1.0, size=(n, 2)), 6)
    return euclidean_graph(pts)


def random_metric(rng: np.random.Generator, n: int) -> MetricGraph:
    """Shortest-path closure of a complete graph with random edge lengths."""
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            edges.append((u, v, round(float(rng.uniform(0.5, 1.5)), 6)))
    return metric_closure(edges, n)


def random_tree(rng: np.random.Generator, g: MetricGraph, size: int) -> Tree:
    """Random tree shape over a random vertex subset; not an MST."""
    verts = sorted(rng.choice(g.n, size=size, replace=False).tolist())
    order = list(verts)
    rng.shuffle(order)
    edges = []
    for i in range(1, len(order)):
        j = int(rng.integers(0, i))
        u, v = order[j], order[i]
        edges.append((min(u, v), max(u, v)))
    return Tree(vertices=tuple(sorted(verts)), edges=tuple(sorted(edges)))


def tree_weight(g: MetricGraph, t: Tree) -> float:
    return float(sum(g.dist[u, v] for u, v in t.edges))


def random_vertex_groups(rng: np.random.Generator, n: int, m: int):
    """Disjoint vertex sequences usable as paths, one per group, all nonempty."""
    perm = rng.permutation(n).tolist()
    cuts = sorted(rng.choice(np.arange(1, n), size=m - 1, replace=False).tolist()) if m > 1 else []
    out = []
    lo = 0
    for hi in cuts + [n]:
        out.append([int(v) for v in perm[lo:hi]])
        lo = hi
    return out
