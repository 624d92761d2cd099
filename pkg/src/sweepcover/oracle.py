"""Exact brute-force solvers over vertex subsets, for desk-scale audits.

Subset DP tables: for every vertex subset S the cheapest simple path
spanning S, and from that the cheapest partition of S into exactly p
vertex-disjoint path blocks (or tree blocks for forest problems).
Everything here is exponential and capped at ORACLE_CAP vertices; it
exists to certify the polynomial solvers on small instances, never to be
fast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import BscInstance, MetricGraph, PathSet, make_pathset

ORACLE_CAP = 16
_TOL = 1e-9


class OracleError(ValueError):
    pass


def _popcounts(full: int) -> np.ndarray:
    masks = np.arange(full, dtype=np.uint32)
    counts = np.zeros(full, dtype=np.int64)
    while masks.any():
        counts += masks & 1
        masks >>= 1
    return counts


def _scaled_dist(g: MetricGraph, exact: bool) -> tuple[np.ndarray, float]:
    # exact mode: weights with at most 6 decimal digits become integers,
    # so DP comparisons are free of float ties.
    if exact:
        return np.round(g.dist * 1e6), 1e6
    return g.dist, 1.0


@dataclass
class PathCoverTable:
    """min_block_weight[S] = cheapest simple path spanning exactly S;
    cover[p][S] = cheapest p-block path partition of S (inf if |S| < p)."""

    n: int
    m_max: int
    dist: np.ndarray  # scale-adjusted copy used by the DP
    end_weight: np.ndarray  # (2^n, n): cheapest path spanning S ending at v
    min_block_weight: np.ndarray  # (2^n,)
    cover: np.ndarray  # (m_max + 1, 2^n)
    popcount: np.ndarray
    scale: float


def _best_path_ending(dist: np.ndarray, n: int) -> np.ndarray:
    full = 1 << n
    end = np.full((full, n), np.inf)
    for v in range(n):
        end[1 << v, v] = 0.0
    cols = np.arange(n)
    for s in range(1, full):
        row = end[s]
        ins = cols[((s >> cols) & 1) == 1]
        outs = cols[((s >> cols) & 1) == 0]
        if outs.size == 0:
            continue
        cand = np.min(row[ins, None] + dist[np.ix_(ins, outs)], axis=0)
        for j, u in enumerate(outs):
            t = s | (1 << int(u))
            if cand[j] < end[t, u]:
                end[t, u] = cand[j]
    return end


def _partition_cover(block_cost: np.ndarray, n: int, m_max: int) -> np.ndarray:
    """cover[p][S]: cheapest split of S into p disjoint blocks.

    The block containing the lowest vertex of S is enumerated first, which
    makes each partition counted exactly once.
    """
    full = 1 << n
    cover = np.full((m_max + 1, full), np.inf)
    cover[0, 0] = 0.0
    for p in range(1, m_max + 1):
        prev = cover[p - 1]
        cur = cover[p]
        for s in range(1, full):
            low = s & (-s)
            best = np.inf
            t = s
            while t:
                if t & low:
                    c = block_cost[t] + prev[s ^ t]
                    if c < best:
                        best = c
                t = (t - 1) & s
            cur[s] = best
    return cover


def build_path_cover_table(g: MetricGraph, m_max: int, *, exact: bool = False) -> PathCoverTable:
    n = g.n
    if n > ORACLE_CAP:
        raise OracleError("oracle cap exceeded")
    if m_max < 1:
        raise OracleError("m_max must be at least 1")
    dist, scale = _scaled_dist(g, exact)
    end = _best_path_ending(dist, n)
    min_block = end.min(axis=1)
    min_block[0] = np.inf
    cover = _partition_cover(min_block, n, m_max)
    return PathCoverTable(
        n=n,
        m_max=m_max,
        dist=dist,
        end_weight=end,
        min_block_weight=min_block,
        cover=cover,
        popcount=_popcounts(1 << n),
        scale=scale,
    )


@dataclass
class TreeCoverTable:
    """mst_weight[S] = minimum spanning tree of the sub-metric on S;
    cover[p][S] = cheapest p-component spanning forest of exactly S."""

    n: int
    m_max: int
    mst_weight: np.ndarray
    cover: np.ndarray
    popcount: np.ndarray
    scale: float


def _mst_per_subset(dist: np.ndarray, n: int) -> np.ndarray:
    full = 1 << n
    out = np.full(full, np.inf)
    for s in range(1, full):
        verts = [v for v in range(n) if (s >> v) & 1]
        if len(verts) == 1:
            out[s] = 0.0
            continue
        # Prim from the lowest vertex of the subset
        sub = dist[np.ix_(verts, verts)]
        k = len(verts)
        best = sub[0].copy()
        used = np.zeros(k, dtype=bool)
        used[0] = True
        total = 0.0
        for _ in range(k - 1):
            best_masked = np.where(used, np.inf, best)
            j = int(np.argmin(best_masked))
            total += best_masked[j]
            used[j] = True
            np.minimum(best, sub[j], out=best)
        out[s] = total
    return out


def build_tree_cover_table(g: MetricGraph, m_max: int, *, exact: bool = False) -> TreeCoverTable:
    n = g.n
    if n > ORACLE_CAP:
        raise OracleError("oracle cap exceeded")
    if m_max < 1:
        raise OracleError("m_max must be at least 1")
    dist, scale = _scaled_dist(g, exact)
    mst = _mst_per_subset(dist, n)
    cover = _partition_cover(mst, n, m_max)
    return TreeCoverTable(
        n=n,
        m_max=m_max,
        mst_weight=mst,
        cover=cover,
        popcount=_popcounts(1 << n),
        scale=scale,
    )


def opt_kminwp(table: PathCoverTable, m: int, k: int) -> float:
    """Cheapest m vertex-disjoint paths spanning at least k vertices."""
    if not 1 <= m <= table.m_max:
        raise OracleError("m outside table range")
    if k < m:
        raise OracleError("k must be at least m")
    if k > table.n:
        raise OracleError("k exceeds vertex count")
    feasible = table.popcount >= k
    return float(np.min(table.cover[m][feasible]) / table.scale)


def _penalty_subset_sums(pi: np.ndarray, n: int) -> np.ndarray:
    full = 1 << n
    sums = np.zeros(full)
    idx = np.arange(full)
    for v in range(n):
        sums[(idx >> v) & 1 == 1] += pi[v]
    return sums


def _check_penalties(pi, n: int) -> np.ndarray:
    arr = np.asarray(pi, dtype=float)
    if arr.shape != (n,):
        raise OracleError("penalty vector has wrong length")
    if np.any(arr < 0):
        raise OracleError("penalties must be nonnegative")
    return arr


def opt_pcp(table: PathCoverTable, pi, m: int) -> float:
    """Optimal m-path prize-collecting value: path weight plus unspanned penalties."""
    arr = _check_penalties(pi, table.n)
    if not 1 <= m <= table.m_max:
        raise OracleError("m outside table range")
    psum = _penalty_subset_sums(arr, table.n)
    objective = table.cover[m] / table.scale + (float(arr.sum()) - psum)
    return float(np.min(objective))


def opt_pcf(table: TreeCoverTable, pi, m: int) -> float:
    """Optimal m-component prize-collecting forest value."""
    arr = _check_penalties(pi, table.n)
    if not 1 <= m <= table.m_max:
        raise OracleError("m outside table range")
    psum = _penalty_subset_sums(arr, table.n)
    objective = table.cover[m] / table.scale + (float(arr.sum()) - psum)
    return float(np.min(objective))


def opt_mop(table: PathCoverTable, m: int, budget: float) -> int:
    """Most vertices spanned by m vertex-disjoint paths of total weight <= budget."""
    if not 1 <= m <= table.m_max:
        raise OracleError("m outside table range")
    if budget < 0:
        raise OracleError("budget must be nonnegative")
    feasible = table.cover[m] / table.scale <= budget + _TOL
    if not feasible.any():
        raise OracleError("no feasible path set")  # unreachable: m trivial paths cost 0
    return int(np.max(table.popcount[feasible]))


def bsc_upper_bound(inst: BscInstance) -> int:
    """Exact cap on sweep-coverable PoIs: the orienteering optimum at the
    fleet's total travel budget, with one path per sensor."""
    n = inst.graph.n
    if inst.sensors == 0:
        return 0
    m = min(inst.sensors, n)
    table = build_path_cover_table(inst.graph, m)
    return opt_mop(table, m, inst.budget)


def recover_kminwp_witness(g: MetricGraph, table: PathCoverTable, m: int, k: int) -> PathSet:
    """A concrete optimal path set realizing opt_kminwp, for audits."""
    value = opt_kminwp(table, m, k) * table.scale
    feasible = np.where(table.popcount >= k, table.cover[m], np.inf)
    s = int(np.argmin(feasible))
    return _recover_partition(g, table, s, m, value)


def _recover_partition(g: MetricGraph, table: PathCoverTable, s: int, p: int, value: float) -> PathSet:
    tol = _TOL * max(1.0, table.scale)
    blocks: list[list[int]] = []
    remaining = s
    need = value
    for depth in range(p, 0, -1):
        if depth == 1:
            blocks.append(_recover_path(table, remaining))
            break
        low = remaining & (-remaining)
        t = remaining
        found = False
        while t:
            if t & low:
                rest = remaining ^ t
                c = table.min_block_weight[t] + table.cover[depth - 1][rest]
                if abs(c - need) <= tol:
                    blocks.append(_recover_path(table, t))
                    need -= float(table.min_block_weight[t])
                    remaining = rest
                    found = True
                    break
            t = (t - 1) & remaining
        if not found:
            raise OracleError("witness recovery failed")
    return make_pathset(g, blocks)


def _recover_path(table: PathCoverTable, s: int) -> list[int]:
    tol = _TOL * max(1.0, table.scale)
    v = int(np.argmin(table.end_weight[s]))
    order = [v]
    cur = s
    val = float(table.end_weight[s, v])
    while cur != (1 << v):
        prev_mask = cur ^ (1 << v)
        found = False
        for u in range(table.n):
            if (prev_mask >> u) & 1:
                w = float(table.end_weight[prev_mask, u])
                if np.isfinite(w) and abs(w + float(table.dist[u, v]) - val) <= tol:
                    order.append(u)
                    cur = prev_mask
                    val = w
                    v = u
                    found = True
                    break
        if not found:
            raise OracleError("path witness recovery failed")
    order.reverse()
    return order
