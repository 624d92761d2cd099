"""Prize-collecting forest and path solvers.

The forest solver grows uniform dual moats around every vertex: active
components expand at unit rate, merge when an edge between them becomes
tight, and deactivate once their accumulated dual exhausts their penalty
budget.  Deactivated subtrees that hang off the rest of a tree by a
single edge are pruned away and pay their penalties instead.  The number
of surviving components is steered toward an exact target by adding a
uniform offset to every penalty and binary-searching that offset.  Every
forest seen along the search, plus the cluster decompositions obtained
by cutting the global minimum spanning tree at each weight threshold, is
adjusted to the target component count and entered as a candidate; the
candidate with the smallest certificate value wins.

The path solver shortcuts each tree along its doubled Euler tour, which
at most doubles the weight, and reports a linear certificate of the form
(path weight) + r * (penalty of unspanned vertices) for audits against
an exact optimum.
"""

from __future__ import annotations

import logging
import weakref
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .graph import GraphError, MetricGraph, Path, PathSet, make_path

log = logging.getLogger("sweepcover.prize_collecting")

_LAMBDA_RESOLUTION = 1e-6
_DUAL_TOL = 1e-12


@dataclass(frozen=True)
class Tree:
    """Connected acyclic vertex/edge set; a single vertex is a valid tree."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Forest:
    """Vertex-disjoint trees plus the penalty carried by uncovered vertices."""

    trees: tuple[Tree, ...]
    cost: float
    unspanned_penalty: float

    @property
    def spanned(self) -> frozenset[int]:
        return frozenset(v for t in self.trees for v in t.vertices)


@dataclass(frozen=True)
class LmpCertificate:
    """States: solution_cost + penalty_term <= r * optimum.

    bound_rhs stays None until an audit fills in r * optimum from an
    exact solver; holds() is then the inequality at the given tolerance.
    """

    r: float
    solution_cost: float
    penalty_term: float
    bound_rhs: float | None = None

    def holds(self, tol: float = 1e-9) -> bool:
        if self.bound_rhs is None:
            return True
        return self.solution_cost + self.penalty_term <= self.bound_rhs + tol

    def with_bound(self, optimum: float) -> "LmpCertificate":
        return LmpCertificate(self.r, self.solution_cost, self.penalty_term, self.r * optimum)


def _check_penalties(pi, n: int) -> np.ndarray:
    arr = np.asarray(pi, dtype=float)
    if arr.shape != (n,):
        raise GraphError("penalty vector must have one entry per vertex")
    if np.any(arr < 0):
        raise GraphError("penalties must be nonnegative")
    return arr


def _grow(dist: np.ndarray, penalties: np.ndarray):
    """Uniform moat growth; returns (merge edges, deactivation history).

    Event simulation over the complete metric.  comp_of maps vertices to
    component ids; mass[v] is the total time v's components were active,
    so an edge (u, v) between different components is tight exactly when
    mass[u] + mass[v] reaches its length.
    """
    n = len(penalties)
    comp_of = np.arange(n)
    active_of = np.ones(n, dtype=bool)  # per vertex: is its component active
    mass = np.zeros(n)
    members: dict[int, list[int]] = {v: [v] for v in range(n)}
    dual: dict[int, float] = {v: 0.0 for v in range(n)}
    budget: dict[int, float] = {v: float(penalties[v]) for v in range(n)}
    next_id = n
    merge_edges: list[tuple[int, int]] = []
    history: list[frozenset[int]] = []

    def deactivate(cid: int) -> None:
        active_of[members[cid]] = False
        history.append(frozenset(members[cid]))

    # components with zero budget die before anything grows
    for cid in range(n):
        if budget[cid] <= _DUAL_TOL:
            deactivate(cid)

    guard = 0
    while active_of.any():
        guard += 1
        if guard > 4 * n + 8:
            raise RuntimeError("moat growth failed to terminate")
        rate = active_of[:, None].astype(np.int64) + active_of[None, :]
        cross = comp_of[:, None] != comp_of[None, :]
        usable = cross & (rate > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_edge = np.where(usable, (dist - mass[:, None] - mass[None, :]) / rate, np.inf)
        np.maximum(t_edge, 0.0, out=t_edge)
        flat = int(np.argmin(t_edge))
        eu, ev = divmod(flat, n)
        te = float(t_edge[eu, ev])

        td = np.inf
        dying = -1
        for cid in sorted(set(comp_of[active_of].tolist())):
            slack = max(0.0, budget[cid] - dual[cid])
            if slack < td - _DUAL_TOL:
                td = slack
                dying = cid

        step = min(te, td)
        if not np.isfinite(step):
            raise RuntimeError("no growth event available")
        mass[active_of] += step
        for cid in set(comp_of[active_of].tolist()):
            dual[cid] += step

        if te <= td:
            cu, cv = int(comp_of[eu]), int(comp_of[ev])
            merged = sorted(members[cu] + members[cv])
            cid = next_id
            next_id += 1
            members[cid] = merged
            dual[cid] = dual[cu] + dual[cv]
            budget[cid] = budget[cu] + budget[cv]
            comp_of[merged] = cid
            active_of[merged] = True
            merge_edges.append((min(eu, ev), max(eu, ev)))
            for old in (cu, cv):
                del members[old], dual[old], budget[old]
            if dual[cid] >= budget[cid] - _DUAL_TOL:
                deactivate(cid)
        else:
            deactivate(dying)
    return merge_edges, history


def _prune(merge_edges: list[tuple[int, int]], history: list[frozenset[int]]) -> list[Tree]:
    """Drop every deactivated vertex set connected by exactly one edge.

    Iterates to a fixed point over the deactivation history in reverse
    order.  Surviving connected components become trees; a vertex that
    loses all incident edges but was never itself pruned survives as a
    single-vertex tree.
    """
    edges = set(merge_edges)
    present = {v for e in merge_edges for v in e}
    removed: set[int] = set()
    changed = True
    while changed:
        changed = False
        for group in reversed(history):
            if not group or (group & removed):
                continue
            if not group <= present:
                continue
            crossing = [e for e in edges if (e[0] in group) != (e[1] in group)]
            if len(crossing) == 1:
                removed |= group
                present -= group
                edges = {e for e in edges if e[0] not in group and e[1] not in group}
                changed = True
    # connected components of what is left
    adj: dict[int, list[int]] = {v: [] for v in present}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    trees: list[Tree] = []
    for start in sorted(present):
        if start in seen:
            continue
        stack = [start]
        comp = []
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comp_set = set(comp)
        tedges = tuple(sorted(e for e in edges if e[0] in comp_set))
        trees.append(Tree(tuple(sorted(comp)), tedges))
    return trees


def _forest_value(g: MetricGraph, trees: list[Tree], pi: np.ndarray) -> tuple[float, float]:
    cost = float(sum(g.dist[u, v] for t in trees for (u, v) in t.edges))
    spanned = {v for t in trees for v in t.vertices}
    penalty = float(sum(pi[v] for v in range(g.n) if v not in spanned))
    return cost, penalty


def _mst_edges(dist: np.ndarray, verts: list[int]) -> tuple[tuple[int, int], ...]:
    """Prim over a vertex subset of the metric; edges as sorted pairs."""
    k = len(verts)
    if k <= 1:
        return ()
    sub = dist[np.ix_(verts, verts)]
    best = sub[0].copy()
    parent = np.zeros(k, dtype=int)
    used = np.zeros(k, dtype=bool)
    used[0] = True
    edges = []
    for _ in range(k - 1):
        masked = np.where(used, np.inf, best)
        j = int(np.argmin(masked))
        a, b = verts[parent[j]], verts[j]
        edges.append((min(a, b), max(a, b)))
        used[j] = True
        closer = sub[j] < best
        parent[closer] = j
        np.minimum(best, sub[j], out=best)
    return tuple(sorted(edges))


def _remst(g: MetricGraph, trees: list[Tree]) -> list[Tree]:
    """Replace each tree by the minimum spanning tree of its own vertices.

    Never increases the cost, so it never weakens a certificate."""
    return [Tree(t.vertices, _mst_edges(g.dist, list(t.vertices))) for t in trees]


def _components(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> list[Tree]:
    verts = sorted(set(vertices))
    edge_list = sorted(set(edges))
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for u, v in edge_list:
        adj[u].append(v)
        adj[v].append(u)
    seen: set[int] = set()
    out: list[Tree] = []
    for start in verts:
        if start in seen:
            continue
        stack, comp = [start], []
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        comp_set = set(comp)
        out.append(Tree(tuple(sorted(comp)), tuple(sorted(e for e in edge_list if e[0] in comp_set))))
    return out


def _split_and_pad(g: MetricGraph, trees: list[Tree], pi: np.ndarray, m: int) -> list[Tree]:
    """Raise the component count to exactly m.

    Deletes the globally heaviest tree edge while any edge remains (every
    deletion splits one tree and lowers the cost), then pads with the
    highest-penalty unspanned vertices as single-vertex trees.  Both moves
    only improve the certificate value.
    """
    trees = list(trees)
    while len(trees) < m:
        heaviest = None
        for idx, t in enumerate(trees):
            for (u, v) in t.edges:
                key = (-float(g.dist[u, v]), u, v)
                if heaviest is None or key < heaviest[0]:
                    heaviest = (key, idx, (u, v))
        if heaviest is not None:
            _, idx, cut = heaviest
            t = trees.pop(idx)
            rest = [e for e in t.edges if e != cut]
            trees.extend(_components(t.vertices, rest))
        else:
            spanned = {v for t in trees for v in t.vertices}
            free = sorted((v for v in range(g.n) if v not in spanned), key=lambda v: (-pi[v], v))
            if not free:
                raise RuntimeError("cannot reach the requested component count")
            trees.append(Tree((free[0],), ()))
    trees.sort(key=lambda t: t.vertices[0])
    return trees


def _drop_to_m(g: MetricGraph, trees: list[Tree], pi: np.ndarray, m: int) -> list[Tree]:
    """Keep the m trees whose removal would hurt the certificate most."""
    scored = []
    for t in trees:
        w = float(sum(g.dist[u, v] for (u, v) in t.edges))
        p = float(sum(pi[v] for v in t.vertices))
        scored.append((-(2.0 * p - w), t.vertices[0], t))
    scored.sort()
    kept = [t for _, _, t in scored[:m]]
    kept.sort(key=lambda t: t.vertices[0])
    return kept


def _merge_to_m(g: MetricGraph, trees: list[Tree], m: int) -> list[Tree]:
    """Connect nearest components until only m remain.

    Ascending scan over the cached edge list with union-find; picks the
    same merges as repeatedly adding the cheapest crossing edge, with
    equally cheap edges resolved by the smaller vertex pair.
    """
    trees = list(trees)
    count = len(trees)
    if count > m:
        owner = {v: i for i, t in enumerate(trees) for v in t.vertices}
        parent = list(range(count))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        extra: list[list[tuple[int, int]]] = [[] for _ in trees]
        for _, u, v in _sorted_edges(g):
            if u not in owner or v not in owner:
                continue
            ru, rv = find(owner[u]), find(owner[v])
            if ru == rv:
                continue
            parent[ru] = rv
            extra[rv].extend(extra[ru])
            extra[rv].append((u, v))
            count -= 1
            if count == m:
                break
        groups: dict[int, list[int]] = {}
        for i in range(len(trees)):
            groups.setdefault(find(i), []).append(i)
        trees = [
            Tree(
                tuple(sorted(v for i in members for v in trees[i].vertices)),
                tuple(sorted(
                    [e for i in members for e in trees[i].edges] + extra[root]
                )),
            )
            for root, members in groups.items()
        ]
    trees.sort(key=lambda t: t.vertices[0])
    return trees


def _adjusted_variants(g: MetricGraph, pi: np.ndarray, trees: list[Tree], m: int) -> list[list[Tree]]:
    c = len(trees)
    if c == m:
        return [list(trees)]
    if c < m:
        return [_split_and_pad(g, trees, pi, m)]
    return [_drop_to_m(g, trees, pi, m), _merge_to_m(g, trees, m)]


_EDGE_CACHE: "weakref.WeakKeyDictionary[MetricGraph, list[tuple[float, int, int]]]" = (
    weakref.WeakKeyDictionary()
)
_SNAPSHOT_CACHE: "weakref.WeakKeyDictionary[MetricGraph, list[list[Tree]]]" = (
    weakref.WeakKeyDictionary()
)


def _sorted_edges(g: MetricGraph) -> list[tuple[float, int, int]]:
    """All vertex pairs ascending by (weight, u, v); cached per graph."""
    cached = _EDGE_CACHE.get(g)
    if cached is None:
        iu, iv = np.triu_indices(g.n, k=1)
        w = g.dist[iu, iv]
        order = np.lexsort((iv, iu, w))
        cached = [(float(w[t]), int(iu[t]), int(iv[t])) for t in order]
        _EDGE_CACHE[g] = cached
    return cached


def _kruskal_snapshots(g: MetricGraph) -> list[list[Tree]]:
    """Forest snapshots after each Kruskal step on the full metric.

    Snapshot 0 is all singletons; the last is the full minimum spanning
    tree.  Cutting the tree at every weight threshold this way sweeps all
    cluster granularities of the instance.  Penalty-independent, so the
    result is cached per graph.
    """
    cached = _SNAPSHOT_CACHE.get(g)
    if cached is not None:
        return cached
    n = g.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[tuple[int, int]] = []
    snaps = [_components(range(n), [])]
    for _, u, v in _sorted_edges(g):
        ru, rv = find(u), find(v)
        if ru == rv:
            continue
        parent[ru] = rv
        edges.append((u, v))
        snaps.append(_components(range(n), edges))
        if len(edges) == n - 1:
            break
    _SNAPSHOT_CACHE[g] = snaps
    return snaps


def solve_pcf(g: MetricGraph, pi, m: int) -> Forest:
    """Approximate m-component prize-collecting forest.

    Candidate forests come from two generators: moat-growing runs across
    the binary search on the uniform penalty offset, and the cluster
    decompositions obtained by cutting the global minimum spanning tree
    at every weight threshold.  Every candidate is adjusted to exactly m
    components (split heaviest edges / pad isolated vertices / drop or
    reconnect whole trees) and the forest with the smallest certificate
    value cost + 2 * penalty(uncovered) wins.

    Contract (audited, not proven here): the returned forest F satisfies
    cost(F) + 2 * penalty(uncovered) <= 2 * optimum over all forests
    with exactly m components.
    """
    return _best_forest(g, _check_penalties(pi, g.n), m, by_path=False)


def _forest_candidates(g: MetricGraph, arr: np.ndarray, m: int) -> list[list[Tree]]:
    """All m-component candidate forests from both generators."""
    dist = g.dist

    def grown(lam: float) -> list[Tree]:
        edges, history = _grow(dist, arr + lam)
        return _prune(edges, history)

    raw: list[list[Tree]] = []
    base = grown(0.0)
    raw.append(base)
    if len(base) > m:
        # a uniform offset past the largest distance merges everything:
        # every moat then grows long enough to absorb its nearest
        # neighbour before running out of budget
        hi = max(g.n * float(arr.max(initial=0.0)), float(dist.max()))
        lo = 0.0
        top = grown(hi)
        raw.append(top)
        if len(top) != m:
            while hi - lo > _LAMBDA_RESOLUTION:
                mid = 0.5 * (lo + hi)
                cur = grown(mid)
                raw.append(cur)
                if len(cur) == m:
                    break
                if len(cur) > m:
                    lo = mid
                else:
                    hi = mid
    raw.extend(_kruskal_snapshots(g))

    out: list[list[Tree]] = []
    for trees in raw:
        for variant in _adjusted_variants(g, arr, trees, m):
            out.append(_remst(g, variant))
    return out


def _best_forest(g: MetricGraph, arr: np.ndarray, m: int, by_path: bool) -> Forest:
    """Pick the candidate with the smallest certificate value.

    With by_path False the certificate is cost + 2 * penalty over the
    forest itself; with by_path True each candidate is first shortcut
    into paths and ranked by path cost + 4 * penalty instead.
    """
    if not 1 <= m <= g.n:
        raise GraphError("component count must be between 1 and n")
    best_key: tuple[float, int] | None = None
    best_trees: list[Tree] | None = None
    idx = 0
    for candidate in _forest_candidates(g, arr, m):
        cost, penalty = _forest_value(g, candidate, arr)
        if by_path:
            path_cost = float(sum(tree_to_path(g, t).weight for t in candidate))
            key = (path_cost + 4.0 * penalty, idx)
        else:
            key = (cost + 2.0 * penalty, idx)
        if best_key is None or key < best_key:
            best_key = key
            best_trees = candidate
        idx += 1
    assert best_trees is not None
    trees = sorted(best_trees, key=lambda t: t.vertices[0])
    cost, penalty = _forest_value(g, trees, arr)
    log.debug(
        "solve_pcf: m=%d by_path=%s cost=%.6f penalty=%.6f candidates=%d",
        m, by_path, cost, penalty, idx,
    )
    return Forest(tuple(trees), cost, penalty)


def tree_to_path(g: MetricGraph, tree: Tree) -> Path:
    """Shortcut a tree into a path over the same vertices.

    Doubling every tree edge gives a closed walk of weight 2 w(T); taking
    vertices in first-visit order keeps a cycle of at most that weight by
    the triangle inequality, and dropping the cycle's heaviest edge leaves
    a path, so the result never exceeds 2 w(T).
    """
    verts = tree.vertices
    if len(verts) == 1:
        return make_path(g, verts)
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for u, v in tree.edges:
        if u not in adj or v not in adj:
            raise GraphError("tree edge endpoint outside vertex set")
        adj[u].append(v)
        adj[v].append(u)
    root = min(verts)
    order: list[int] = []
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for u in sorted(adj[v], reverse=True):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(order) != len(verts):
        raise GraphError("tree not connected")
    q = len(order)
    cycle = [float(g.dist[order[i], order[(i + 1) % q]]) for i in range(q)]
    h = int(np.argmax(cycle))
    rotated = order[h + 1 :] + order[: h + 1]
    return make_path(g, rotated)


def solve_pcp(g: MetricGraph, pi, m: int) -> tuple[PathSet, LmpCertificate]:
    """Approximate m-path prize-collecting solution with its certificate.

    Contract (audited): path cost + 4 * penalty(unspanned) <= 4 * optimum
    over all m-path solutions.
    """
    arr = _check_penalties(pi, g.n)
    forest = _best_forest(g, arr, m, by_path=True)
    paths = tuple(tree_to_path(g, t) for t in forest.trees)
    ps = PathSet(
        paths=paths,
        m=len(paths),
        spanned=sum(p.q for p in paths),
        cost=float(sum(p.weight for p in paths)),
    )
    cert = LmpCertificate(
        r=4.0,
        solution_cost=ps.cost,
        penalty_term=4.0 * forest.unspanned_penalty,
    )
    return ps, cert
