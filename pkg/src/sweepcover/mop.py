"""Budgeted multi-path vertex coverage by guess-and-extract.

For every guess k of the unknown best coverage, the bicriteria solver
produces m cheap disjoint paths spanning roughly k vertices.  Each path
is then viewed as a line segment, chopped into equal-length arcs, and
only the arc holding the most vertices survives, which divides the cost
by the arc count while keeping a predictable fraction of the vertices.
The guess whose surviving paths fit the budget and keep the most
vertices wins.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MetricGraph, Path, PathSet, make_path, make_pathset
from .kminwp import BicriteriaSolution, SolutionMode, solve_kminwp

log = logging.getLogger("sweepcover.mop")

# the spanned-fraction guarantee min{f, g} below is maximized here,
# where the two branch fractions coincide
ALPHA_STAR = 11.0 - 4.0 * math.sqrt(7.0)


def feasible_fraction(alpha: float) -> float:
    """Guaranteed coverage fraction when the guess spans >= k vertices."""
    return (1.0 - alpha) / (17.0 - alpha)


def bicriteria_fraction(alpha: float) -> float:
    """Guaranteed coverage fraction when the guess spans only > alpha*k."""
    return alpha * (1.0 - alpha) / (9.0 - 5.0 * alpha)


def guaranteed_fraction(alpha: float) -> float:
    """Worst-case coverage fraction of the returned solution."""
    return min(feasible_fraction(alpha), bicriteria_fraction(alpha))


@dataclass(frozen=True)
class MopParams:
    """Path count, total budget, and the tuning knobs."""

    m: int
    budget: float
    alpha: float = ALPHA_STAR
    eps: float = 0.001


@dataclass(frozen=True)
class SegmentDivision:
    """A path's vertices bucketed into equal arc-length segments.

    Segment i covers arc positions [i*w/ls, (i+1)*w/ls), except the last
    segment which is closed on the right; a vertex exactly on a boundary
    belongs to the right segment.
    """

    path: Path
    ls: int
    boundaries: tuple[float, ...]
    segments: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class KGuess:
    """Diagnostics for one coverage guess."""

    k: int
    mode: SolutionMode
    ls: int
    guess_spanned: int
    guess_cost: float
    extracted_spanned: int
    extracted_cost: float
    feasible: bool
    used_full: bool
    budget_estimate: float
    rounds: int


@dataclass(frozen=True)
class MopResult:
    """Chosen path set plus the per-guess diagnostics."""

    pathset: PathSet
    k_star: int | None
    guesses: tuple[KGuess, ...] = field(repr=False)


def vertex_positions(g: MetricGraph, p: Path) -> list[float]:
    """Arc-length position of every vertex along the path."""
    pos = [0.0]
    for a, b in zip(p.vertices, p.vertices[1:]):
        pos.append(pos[-1] + float(g.dist[a, b]))
    return pos


def divide_segments(g: MetricGraph, p: Path, ls: int) -> SegmentDivision:
    """Assign each vertex to one of ls equal arc-length segments."""
    if ls < 1:
        raise GraphError("segment count must be at least 1")
    w = p.weight
    boundaries = tuple(i * w / ls for i in range(ls + 1))
    buckets: list[list[int]] = [[] for _ in range(ls)]
    if w <= 0.0:
        # zero-length path: all vertices sit on every boundary; the
        # closed final segment holds them all
        buckets[-1] = list(range(p.q))
    else:
        for i, x in enumerate(vertex_positions(g, p)):
            idx = min(int(math.floor(x * ls / w + 1e-12)), ls - 1)
            buckets[idx].append(i)
    return SegmentDivision(
        path=p,
        ls=ls,
        boundaries=boundaries,
        segments=tuple(tuple(b) for b in buckets),
    )


def heaviest_subpath(g: MetricGraph, p: Path, ls: int) -> Path:
    """Keep only the segment holding the most vertices.

    Vertices with positions in one segment are consecutive along the
    path, so the winning segment is itself a sub-path.  Ties go to the
    lowest segment index.  The result weighs at most w(p)/ls.

    Runs in O(q) regardless of ls: positions are nondecreasing, so the
    per-segment groups are consecutive runs of equal segment index.
    """
    if ls < 1:
        raise GraphError("segment count must be at least 1")
    w = p.weight
    if ls == 1 or w <= 0.0:
        return make_path(g, p.vertices)
    best_start = best_len = 0
    run_start = 0
    run_idx = 0
    for i, x in enumerate(vertex_positions(g, p)):
        idx = min(int(math.floor(x * ls / w + 1e-12)), ls - 1)
        if i == 0:
            run_idx = idx
            continue
        if idx != run_idx:
            if i - run_start > best_len:
                best_start, best_len = run_start, i - run_start
            run_start, run_idx = i, idx
    if p.q - run_start > best_len:
        best_start, best_len = run_start, p.q - run_start
    return make_path(g, p.vertices[best_start : best_start + best_len])


def _evaluate_guess(
    g: MetricGraph, m: int, k: int, budget: float, alpha: float, eps: float
) -> tuple[KGuess, tuple[tuple[int, ...], ...] | None]:
    """One guess: keep the best budget-feasible candidate among the full
    path set (extraction can only lose vertices), the mode-branch
    heaviest-segment extraction, and the extraction with the smallest
    segment count whose pieces fit the budget (ceil(total weight / B),
    so the total extracted weight is at most B by construction).
    """
    sol: BicriteriaSolution = solve_kminwp(g, m, k, alpha, eps)
    spans_target = sol.pathset.spanned >= k
    if spans_target:
        ls = math.ceil(16.0 / (1.0 - alpha) + eps)
    else:
        ls = math.ceil((8.0 - 4.0 * alpha) / (1.0 - alpha) + eps)
    extracted = [heaviest_subpath(g, p, ls) for p in sol.pathset.paths]
    spanned = sum(p.q for p in extracted)
    cost = float(sum(p.weight for p in extracted))

    candidates: list[tuple[list[Path], bool]] = [
        (list(sol.pathset.paths), True),
        (extracted, False),
    ]
    if budget > 0.0 and sol.pathset.cost > budget:
        ls_fit = math.ceil(sol.pathset.cost / budget - 1e-12)
        candidates.append(([heaviest_subpath(g, p, ls_fit) for p in sol.pathset.paths], False))

    kept: tuple[tuple[int, ...], ...] | None = None
    kept_spanned = -1
    used_full = False
    for paths, is_full in candidates:
        total = float(sum(p.weight for p in paths))
        count = sum(p.q for p in paths)
        if total <= budget + 1e-9 and count > kept_spanned:
            kept = tuple(p.vertices for p in paths)
            kept_spanned = count
            used_full = is_full
    guess = KGuess(
        k=k,
        mode=sol.mode,
        ls=ls,
        guess_spanned=sol.pathset.spanned,
        guess_cost=sol.pathset.cost,
        extracted_spanned=spanned,
        extracted_cost=cost,
        feasible=kept is not None,
        used_full=used_full,
        budget_estimate=sol.guess.budget,
        rounds=sol.rounds,
    )
    return guess, kept


def solve_mop_report(g: MetricGraph, params: MopParams, threads: int = 1) -> MopResult:
    """Run every coverage guess and keep the best feasible extraction.

    Guesses below the path count are redundant (m disjoint paths always
    span at least m vertices), so k runs from m to n.  The winning guess
    maximizes extracted vertices within budget, ties to the smallest k;
    if no guess fits the budget, m single-vertex paths on the lowest
    vertex ids are returned.
    """
    if params.budget < 0.0:
        raise GraphError("budget must be nonnegative")
    if not 1 <= params.m <= g.n:
        raise GraphError("path count must be between 1 and n")
    if not 0.0 < params.alpha < 1.0:
        raise GraphError("alpha must lie strictly between 0 and 1")
    if params.eps <= 0.0:
        raise GraphError("eps must be positive")

    ks = list(range(params.m, g.n + 1))
    results: list[tuple[KGuess, tuple[tuple[int, ...], ...] | None]] = []
    if threads > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            futures = [
                ex.submit(_evaluate_guess, g, params.m, k, params.budget, params.alpha, params.eps)
                for k in ks
            ]
            results = [f.result() for f in futures]
    else:
        results = [
            _evaluate_guess(g, params.m, k, params.budget, params.alpha, params.eps) for k in ks
        ]

    best_idx: int | None = None
    best_spanned = -1
    for i, (guess, kept) in enumerate(results):
        if kept is None:
            continue
        spanned = sum(len(vl) for vl in kept)
        if spanned > best_spanned:
            best_idx = i
            best_spanned = spanned
    guesses = tuple(guess for guess, _ in results)
    if best_idx is None:
        pathset = make_pathset(g, [[v] for v in range(params.m)])
        log.debug("solve_mop: no feasible guess, falling back to %d trivial paths", params.m)
        return MopResult(pathset=pathset, k_star=None, guesses=guesses)
    chosen_guess, vertex_lists = results[best_idx]
    assert vertex_lists is not None
    pathset = make_pathset(g, vertex_lists)
    log.debug(
        "solve_mop: k*=%d spanned=%d cost=%.6f over %d guesses",
        chosen_guess.k, pathset.spanned, pathset.cost, len(ks),
    )
    return MopResult(pathset=pathset, k_star=chosen_guess.k, guesses=guesses)


def solve_mop(g: MetricGraph, params: MopParams, threads: int = 1) -> PathSet:
    """Best-within-budget path set; see solve_mop_report for diagnostics."""
    return solve_mop_report(g, params, threads=threads).pathset
