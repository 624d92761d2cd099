"""Sweep-coverage scheduling for a fleet of mobile sensors.

A sensor with speed ``a`` and period ``t`` that oscillates along a segment
of length at most a*t/2 revisits every point of that segment once per
period, so the segment counts as covered.  Scheduling therefore reduces to
placing bounded-length intervals on paths.  This module provides the exact
single-line placement DP, a second DP that splits the fleet across several
paths, a block-tiling fallback that always covers a third of the grouped
vertices, the end-to-end planner that first groups vertices into paths and
then schedules the fleet, and an independent feasibility checker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import (
    BscInstance,
    GraphError,
    MetricGraph,
    PathSet,
    make_pathset,
    normalize,
)
from .mop import ALPHA_STAR, MopParams, MopResult, solve_mop_report, vertex_positions
from .oracle import ORACLE_CAP, bsc_upper_bound

_SLACK = 1e-9


@dataclass(frozen=True)
class LineInstance:
    """Sorted vertex positions along one path plus one sensor's reach.

    window is the longest segment a single sensor can keep covered,
    i.e. half the distance it travels per period.
    """

    positions: tuple[float, ...]
    window: float

    def __post_init__(self) -> None:
        if not self.window > 0:
            raise GraphError("window must be positive")
        if any(b < a for a, b in zip(self.positions, self.positions[1:])):
            raise GraphError("positions must be non-decreasing")

    @property
    def q(self) -> int:
        return len(self.positions)


def _reach_start(positions: Sequence[float], window: float) -> list[int]:
    """For each index i, the smallest j with positions[i] - positions[j] <= window."""
    first = []
    j = 0
    for i, x in enumerate(positions):
        while x - positions[j] > window:
            j += 1
        first.append(j)
    return first


def _line_table(li: LineInstance, cap: int) -> tuple[list[int], np.ndarray]:
    """DP table c[i][j]: most vertices among the first i coverable by j intervals."""
    q = li.q
    first = _reach_start(li.positions, li.window)
    c = np.zeros((q + 1, cap + 1), dtype=np.int64)
    for i in range(1, q + 1):
        f = first[i - 1]
        gain = i - f
        c[i, 0] = c[i - 1, 0]
        # Either vertex i stays uncovered, or it ends an interval that
        # reaches back to vertex f, freeing j-1 intervals for the prefix.
        c[i, 1:] = np.maximum(c[i - 1, 1:], c[f, :-1] + gain)
    return first, c


def line_counts(li: LineInstance, cap: int) -> list[int]:
    """Optimal covered counts for every fleet size 0..cap in one DP sweep."""
    if cap < 0:
        raise GraphError("sensor count must be nonnegative")
    if li.q == 0:
        return [0] * (cap + 1)
    inner = min(cap, li.q)
    _, c = _line_table(li, inner)
    row = [int(v) for v in c[li.q]]
    return row + [row[-1]] * (cap - inner)


def solve_line(li: LineInstance, sensors: int) -> tuple[int, list[tuple[float, float]]]:
    """Cover the most vertices with ``sensors`` intervals of length <= window.

    Returns the covered count and a witness interval list in increasing
    position order.  Exact: each interval may as well start at a vertex,
    and for a fixed right endpoint stretching the interval as far left as
    the window allows is never worse.
    """
    if sensors <= 0 or li.q == 0:
        return 0, []
    cap = min(sensors, li.q)
    first, c = _line_table(li, cap)
    intervals: list[tuple[float, float]] = []
    i, j = li.q, cap
    while i > 0 and j > 0:
        if c[i, j] == c[i - 1, j]:
            i -= 1
            continue
        f = first[i - 1]
        intervals.append((li.positions[f], li.positions[i - 1]))
        i, j = f, j - 1
    intervals.reverse()
    return int(c[li.q, cap]), intervals


@dataclass(frozen=True)
class Allocation:
    """How many sensors each path receives, plus the DP table behind it.

    table[i, K, j] is the most vertices coverable on the first i paths
    using K sensors in total with exactly j of them on path i; -1 marks
    combinations that cannot occur (j > K).
    """

    counts: tuple[int, ...]
    covered: int
    table: np.ndarray = field(repr=False)


def allocate_sensors(
    per_path_opt: Sequence[Sequence[int]],
    total: int,
    path_sizes: Sequence[int] | None = None,
) -> Allocation:
    """Split ``total`` sensors across paths to maximize the summed line optima.

    per_path_opt[i][j] is the covered count on path i with j sensors; rows
    must start at 0 and be non-decreasing, and are clamped at their last
    entry for larger fleet sizes.  path_sizes optionally caps the lookback
    on the preceding path at its vertex count; the cap never excludes an
    optimal split because sensors beyond one per vertex add nothing.
    """
    if total < 0:
        raise GraphError("sensor count must be nonnegative")
    rows = [[int(v) for v in r] for r in per_path_opt]
    if not rows:
        raise GraphError("at least one path required")
    for r in rows:
        if not r or r[0] != 0:
            raise GraphError("each row must start with a zero-sensor value of 0")
        if any(b < a for a, b in zip(r, r[1:])):
            raise GraphError("rows must be non-decreasing")
    p = len(rows)
    table = np.full((p + 1, total + 1, total + 1), -1, dtype=np.int64)
    table[0] = 0
    for i in range(1, p + 1):
        # Best over the previous level for every lookback cap, in one pass.
        prefix_best = np.maximum.accumulate(table[i - 1], axis=1)
        prev_size = total if path_sizes is None or i == 1 else int(path_sizes[i - 2])
        row = rows[i - 1]
        for spent in range(total + 1):
            for here in range(spent + 1):
                rest = spent - here
                back = min(rest, prev_size)
                table[i, spent, here] = prefix_best[rest, back] + row[min(here, len(row) - 1)]
    counts = [0] * p
    remaining = total
    last = int(np.argmax(table[p, total]))
    counts[p - 1] = last
    covered = int(table[p, total, last])
    remaining -= last
    for i in range(p - 1, 0, -1):
        best = int(np.argmax(table[i, remaining, : remaining + 1]))
        counts[i - 1] = best
        remaining -= best
    return Allocation(counts=tuple(counts), covered=covered, table=table)


@dataclass(frozen=True)
class Assignment:
    """One sensor's beat: an arc-length interval on one path."""

    sensor: int
    path: int
    start: float
    end: float


@dataclass(frozen=True)
class Schedule:
    """A full fleet plan under a common speed and period."""

    assignments: tuple[Assignment, ...]
    speed: float
    period: float

    @property
    def window(self) -> float:
        return self.speed * self.period / 2.0


@dataclass(frozen=True)
class CoverageReport:
    """Outcome of checking a schedule against its instance."""

    covered_count: int
    violations: tuple[str, ...] = ()
    upper_bound: int | None = None
    ratio: float | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def richest_blocks(
    g: MetricGraph, ps: PathSet, sensors: int, speed: float, period: float
) -> Schedule:
    """Tile every path with window-length blocks and staff the fullest ones.

    Requires w(ps) <= sensors * speed * period.  When the path set also
    has at most ``sensors`` paths the tiling needs at most 3 * sensors
    blocks, so the selected ones hold at least a third of the spanned
    vertices.  A vertex exactly on a block boundary counts for the earlier
    block.
    """
    window = speed * period / 2.0
    if not window > 0:
        raise GraphError("window must be positive")
    if ps.cost > sensors * speed * period + _SLACK:
        raise GraphError("path set exceeds the fleet's total travel budget")
    occupancy: dict[tuple[int, int], int] = {}
    for pi, p in enumerate(ps.paths):
        blocks = max(1, math.ceil(p.weight / window - 1e-12))
        for x in vertex_positions(g, p):
            b = min(blocks - 1, max(0, math.ceil(x / window - 1e-12) - 1))
            occupancy[pi, b] = occupancy.get((pi, b), 0) + 1
    ranked = sorted(occupancy.items(), key=lambda kv: (-kv[1], kv[0]))
    chosen = sorted(key for key, _ in ranked[:sensors])
    assignments = []
    for sid, (pi, b) in enumerate(chosen):
        w = ps.paths[pi].weight
        assignments.append(
            Assignment(sensor=sid, path=pi, start=b * window, end=min((b + 1) * window, w))
        )
    return Schedule(assignments=tuple(assignments), speed=speed, period=period)


def verify_schedule(inst: BscInstance, ps: PathSet, s: Schedule) -> CoverageReport:
    """Recount coverage from scratch and flag every broken invariant.

    A vertex counts as covered when its arc-length position on its own
    path falls inside some assignment on that path.  Violations are
    reported, never raised, so a bad schedule still yields a report.
    """
    window = inst.speed * inst.period / 2.0
    violations: list[str] = []
    if len(s.assignments) > inst.sensors:
        violations.append(
            f"{len(s.assignments)} assignments exceed the fleet of {inst.sensors}"
        )
    seen_ids = set()
    covered_by_path: dict[int, list[tuple[float, float]]] = {}
    for a in s.assignments:
        if a.sensor in seen_ids:
            violations.append(f"sensor {a.sensor} assigned twice")
        seen_ids.add(a.sensor)
        if not 0 <= a.path < len(ps.paths):
            violations.append(f"sensor {a.sensor} assigned to unknown path {a.path}")
            continue
        if a.end - a.start > window + _SLACK:
            violations.append(
                f"sensor {a.sensor} interval [{a.start:.6f}, {a.end:.6f}] "
                f"exceeds window {window:.6f}"
            )
        w = ps.paths[a.path].weight
        if a.start < -_SLACK or a.end > w + _SLACK or a.end < a.start:
            violations.append(
                f"sensor {a.sensor} interval [{a.start:.6f}, {a.end:.6f}] "
                f"leaves path {a.path} of length {w:.6f}"
            )
        covered_by_path.setdefault(a.path, []).append((a.start, a.end))
    covered = 0
    for pi, p in enumerate(ps.paths):
        spans = covered_by_path.get(pi)
        if not spans:
            continue
        for x in vertex_positions(inst.graph, p):
            if any(lo - _SLACK <= x <= hi + _SLACK for lo, hi in spans):
                covered += 1
    return CoverageReport(covered_count=covered, violations=tuple(violations))


@dataclass(frozen=True)
class BscResult:
    """Final schedule plus everything needed to audit how it was built."""

    schedule: Schedule
    report: CoverageReport
    pathset: PathSet
    allocation: Allocation
    used_blocks: bool
    scale: float
    mop: MopResult = field(repr=False)


def _scaled_schedule(s: Schedule, scale: float, speed: float, period: float) -> Schedule:
    if scale == 1.0:
        return s
    rescaled = tuple(
        Assignment(a.sensor, a.path, a.start * scale, a.end * scale)
        for a in s.assignments
    )
    return Schedule(assignments=rescaled, speed=speed, period=period)


def solve_bsc_report(
    inst: BscInstance,
    alpha: float = ALPHA_STAR,
    eps: float = 0.001,
    *,
    threads: int = 1,
    oracle: bool = False,
) -> BscResult:
    """Plan routes for the whole fleet and report how good they are.

    Stage one groups vertices into sensor-count many disjoint paths whose
    total length fits the fleet's travel budget.  Stage two splits the
    fleet across those paths by DP and places each path's sensors with the
    exact line DP; a block-tiling schedule is built as well and the better
    of the two is returned.  With oracle=True and a small instance the
    report also carries the exact grouping optimum as an upper bound.
    """
    if inst.sensors < 1:
        raise GraphError("at least one sensor required")
    g_in = inst.graph
    g, inst_n = normalize(g_in, inst)
    assert inst_n is not None
    scale = inst.speed / inst_n.speed
    sensors = inst.sensors
    window = inst_n.speed * inst_n.period / 2.0
    # More sensors than vertices helps neither the grouping nor the DPs.
    fleet = min(sensors, g.n)
    mop = solve_mop_report(
        g, MopParams(m=fleet, budget=inst_n.budget, alpha=alpha, eps=eps), threads=threads
    )
    ps = mop.pathset
    lines = [LineInstance(tuple(vertex_positions(g, p)), window) for p in ps.paths]
    rows = [line_counts(li, fleet) for li in lines]
    alloc = allocate_sensors(rows, fleet, path_sizes=[p.q for p in ps.paths])
    assignments: list[Assignment] = []
    sid = 0
    for pi, (li, k) in enumerate(zip(lines, alloc.counts)):
        if k == 0:
            continue
        _, intervals = solve_line(li, k)
        for lo, hi in intervals:
            assignments.append(Assignment(sensor=sid, path=pi, start=lo, end=hi))
            sid += 1
    dp_schedule = Schedule(
        assignments=tuple(assignments), speed=inst_n.speed, period=inst_n.period
    )
    block_schedule = richest_blocks(g, ps, sensors, inst_n.speed, inst_n.period)
    dp_covered = verify_schedule(inst_n, ps, dp_schedule).covered_count
    block_covered = verify_schedule(inst_n, ps, block_schedule).covered_count
    used_blocks = block_covered > dp_covered
    best = block_schedule if used_blocks else dp_schedule
    ps_out = make_pathset(g_in, [list(p.vertices) for p in ps.paths])
    schedule = _scaled_schedule(best, scale, inst.speed, inst.period)
    report = verify_schedule(inst, ps_out, schedule)
    if oracle and g_in.n <= ORACLE_CAP:
        ub = bsc_upper_bound(inst)
        ratio = report.covered_count / ub if ub > 0 else None
        report = CoverageReport(
            covered_count=report.covered_count,
            violations=report.violations,
            upper_bound=ub,
            ratio=ratio,
        )
    return BscResult(
        schedule=schedule,
        report=report,
        pathset=ps_out,
        allocation=alloc,
        used_blocks=used_blocks,
        scale=scale,
        mop=mop,
    )


def solve_bsc(
    inst: BscInstance,
    alpha: float = ALPHA_STAR,
    eps: float = 0.001,
    *,
    threads: int = 1,
    oracle: bool = False,
) -> tuple[Schedule, CoverageReport]:
    """Schedule the fleet; returns the plan and its verification report."""
    res = solve_bsc_report(inst, alpha, eps, threads=threads, oracle=oracle)
    return res.schedule, res.report
