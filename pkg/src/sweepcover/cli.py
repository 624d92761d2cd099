"""Command-line surface: generate instances, run the solvers, verify
schedules, query the exact oracles, and benchmark against them.

Every subcommand prints one JSON report to stdout and exits 0 only when
all internal certificates (budget feasibility, mode claims, schedule
validity) hold.  Set SWEEPCOVER_LOG=info or =debug for progress logs on
stderr; the default is off.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from .graph import (
    BscInstance,
    GraphError,
    MetricGraph,
    load_instance,
    make_pathset,
    parse_instance,
    validate_pathset,
)
from .kminwp import SolutionMode, solve_kminwp
from .mop import ALPHA_STAR, MopParams, solve_mop_report
from .oracle import (
    ORACLE_CAP,
    build_path_cover_table,
    build_tree_cover_table,
    bsc_upper_bound,
    opt_kminwp,
    opt_mop,
    opt_pcf,
    opt_pcp,
)
from .sweep import Assignment, Schedule, solve_bsc_report, verify_schedule

log = logging.getLogger("sweepcover.cli")

DEFAULT_EPS = 0.01
_TOL = 1e-9


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()[:12]


def _read_instance(path: str) -> tuple[MetricGraph, BscInstance | None, str]:
    with open(path, "rb") as fh:
        raw = fh.read()
    g, inst = load_instance(path)
    return g, inst, _digest(raw)


def _emit(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False)
    print(text)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _round6(x: float) -> float:
    return round(float(x), 6)


def generate_instance(
    kind: str,
    n: int,
    seed: int,
    spacing: float = 1.0,
    sensors: int | None = None,
    speed: float = 1.0,
    period: float = 1.0,
) -> dict:
    """Deterministic instance document for the given kind and seed."""
    if n < 1:
        raise GraphError("n must be positive")
    rng = np.random.default_rng(seed)
    data: dict = {}
    if kind == "euclidean":
        pts = rng.uniform(0.0, 1.0, (n, 2))
        data["points"] = [[_round6(x), _round6(y)] for x, y in pts]
    elif kind == "line":
        data["points"] = [[_round6(i * spacing)] for i in range(n)]
    elif kind == "star":
        radii = rng.uniform(0.5, 1.5, max(0, n - 1))
        data["n"] = n
        data["edges"] = [[0, i + 1, _round6(r)] for i, r in enumerate(radii)]
    elif kind == "random-metric":
        data["n"] = n
        data["edges"] = [
            [u, v, _round6(rng.uniform(0.5, 1.5))]
            for u in range(n)
            for v in range(u + 1, n)
        ]
    else:
        raise GraphError(f"unknown instance kind {kind!r}")
    if sensors is not None:
        data["sensors"] = sensors
        data["speed"] = speed
        data["period"] = period
    return data


def instance_bytes(data: dict) -> bytes:
    """Canonical byte encoding; identical inputs give identical files."""
    return (json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n").encode()


def _cmd_gen(args: argparse.Namespace) -> int:
    data = generate_instance(
        args.kind, args.n, args.seed, args.spacing, args.sensors, args.speed, args.period
    )
    raw = instance_bytes(data)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(raw)
    else:
        sys.stdout.write(raw.decode())
    log.info("generated %s n=%d seed=%d digest=%s", args.kind, args.n, args.seed, _digest(raw))
    return 0


def _pathset_doc(ps) -> dict:
    return {
        "paths": [list(p.vertices) for p in ps.paths],
        "spanned": ps.spanned,
        "cost": ps.cost,
    }


def _cmd_solve_kminwp(args: argparse.Namespace) -> int:
    g, _, digest = _read_instance(args.input)
    t0 = time.perf_counter()
    sol = solve_kminwp(g, args.m, args.k, args.alpha, args.eps)
    elapsed = time.perf_counter() - t0
    ps = sol.pathset
    failures = []
    if (err := validate_pathset(g, ps)) is not None:
        failures.append(err)
    if sol.mode is SolutionMode.FEASIBLE and ps.spanned < args.k:
        failures.append(f"feasible claim broken: spans {ps.spanned} < k={args.k}")
    if sol.mode is SolutionMode.BICRITERIA and ps.spanned <= args.alpha * args.k:
        failures.append(f"bicriteria claim broken: spans {ps.spanned} <= alpha*k")
    doc = {
        "command": "solve-kminwp",
        "instance": digest,
        "parameters": {"m": args.m, "k": args.k, "alpha": args.alpha, "eps": args.eps},
        "diagnostics": {
            "budget_estimate": sol.guess.budget,
            "budget_lower": sol.guess.lower,
            "budget_cap": sol.guess.cap,
            "iterations": sol.guess.iterations,
            "trim_rounds": sol.rounds,
        },
        "result": {"mode": sol.mode.value, **_pathset_doc(ps)},
        "violations": failures,
        "time": elapsed,
    }
    _emit(doc, args.output)
    return 0 if not failures else 1


def _cmd_solve_mop(args: argparse.Namespace) -> int:
    g, _, digest = _read_instance(args.input)
    t0 = time.perf_counter()
    res = solve_mop_report(
        g,
        MopParams(m=args.m, budget=args.budget, alpha=args.alpha, eps=args.eps),
        threads=args.threads,
    )
    elapsed = time.perf_counter() - t0
    ps = res.pathset
    failures = []
    if (err := validate_pathset(g, ps)) is not None:
        failures.append(err)
    if ps.cost > args.budget + _TOL:
        failures.append(f"cost {ps.cost} exceeds budget {args.budget}")
    doc = {
        "command": "solve-mop",
        "instance": digest,
        "parameters": {
            "m": args.m,
            "budget": args.budget,
            "alpha": args.alpha,
            "eps": args.eps,
        },
        "diagnostics": {
            "k_star": res.k_star,
            "guesses": [
                {
                    "k": gs.k,
                    "mode": gs.mode.value,
                    "ls": gs.ls,
                    "spanned": gs.extracted_spanned,
                    "cost": gs.extracted_cost,
                    "feasible": gs.feasible,
                }
                for gs in res.guesses
            ],
        },
        "result": _pathset_doc(ps),
        "violations": failures,
        "time": elapsed,
    }
    if args.oracle and g.n <= ORACLE_CAP:
        table = build_path_cover_table(g, args.m)
        ub = opt_mop(table, args.m, args.budget)
        doc["result"]["upper_bound"] = ub
        doc["result"]["ratio"] = ps.spanned / ub if ub else None
    _emit(doc, args.output)
    return 0 if not failures else 1


def _fleet(args: argparse.Namespace, g: MetricGraph, inst: BscInstance | None) -> BscInstance:
    if args.sensors is not None:
        return BscInstance(g, args.sensors, args.speed, args.period)
    if inst is None:
        raise GraphError("instance carries no fleet; pass --sensors/--speed/--period")
    return inst


def _cmd_solve_bsc(args: argparse.Namespace) -> int:
    g, inst, digest = _read_instance(args.input)
    inst = _fleet(args, g, inst)
    t0 = time.perf_counter()
    res = solve_bsc_report(
        inst, args.alpha, args.eps, threads=args.threads, oracle=args.oracle
    )
    elapsed = time.perf_counter() - t0
    chosen = None
    if res.mop.k_star is not None:
        for gs in res.mop.guesses:
            if gs.k == res.mop.k_star:
                chosen = gs
    doc = {
        "command": "solve-bsc",
        "instance": digest,
        "parameters": {
            "sensors": inst.sensors,
            "speed": inst.speed,
            "period": inst.period,
            "alpha": args.alpha,
            "eps": args.eps,
        },
        "diagnostics": {
            "k_star": res.mop.k_star,
            "budget_estimate": chosen.budget_estimate if chosen else None,
            "trim_rounds": chosen.rounds if chosen else None,
            "mode": chosen.mode.value if chosen else None,
            "ls": chosen.ls if chosen else None,
            "allocation": list(res.allocation.counts),
            "used_blocks": res.used_blocks,
            "scale": res.scale,
        },
        "pathset": _pathset_doc(res.pathset),
        "schedule": [
            {"sensor": a.sensor, "path": a.path, "start": a.start, "end": a.end}
            for a in res.schedule.assignments
        ],
        "report": {
            "covered": res.report.covered_count,
            "upper_bound": res.report.upper_bound,
            "ratio": res.report.ratio,
            "violations": list(res.report.violations),
        },
        "time": elapsed,
    }
    _emit(doc, args.output)
    return 0 if res.report.ok else 1


def _cmd_verify(args: argparse.Namespace) -> int:
    g, inst, digest = _read_instance(args.input)
    inst = _fleet(args, g, inst)
    with open(args.schedule, "r", encoding="utf-8") as fh:
        saved = json.load(fh)
    ps = make_pathset(g, [list(p) for p in saved["pathset"]["paths"]])
    assignments = tuple(
        Assignment(int(r["sensor"]), int(r["path"]), float(r["start"]), float(r["end"]))
        for r in saved["schedule"]
    )
    schedule = Schedule(assignments=assignments, speed=inst.speed, period=inst.period)
    report = verify_schedule(inst, ps, schedule)
    failures = list(report.violations)
    stored = saved.get("report", {}).get("covered")
    if stored is not None and stored != report.covered_count:
        failures.append(
            f"stored covered count {stored} does not match recount {report.covered_count}"
        )
    doc = {
        "command": "verify",
        "instance": digest,
        "result": {"covered": report.covered_count},
        "violations": failures,
    }
    _emit(doc, args.output)
    return 0 if not failures else 1


def _cmd_oracle(args: argparse.Namespace) -> int:
    g, inst, digest = _read_instance(args.input)
    what = args.what
    result: dict = {}
    if what == "kminwp":
        table = build_path_cover_table(g, args.m)
        result["value"] = opt_kminwp(table, args.m, args.k)
    elif what == "pcp":
        table = build_path_cover_table(g, args.m)
        result["value"] = opt_pcp(table, np.full(g.n, args.penalty), args.m)
    elif what == "pcf":
        table = build_tree_cover_table(g, args.m)
        result["value"] = opt_pcf(table, np.full(g.n, args.penalty), args.m)
    elif what == "mop":
        table = build_path_cover_table(g, args.m)
        result["value"] = opt_mop(table, args.m, args.budget)
    elif what == "bsc-ub":
        inst = _fleet(args, g, inst)
        result["value"] = bsc_upper_bound(inst)
    else:  # pragma: no cover - argparse rejects it first
        raise GraphError(f"unknown oracle query {what!r}")
    doc = {"command": "oracle", "what": what, "instance": digest, "result": result}
    _emit(doc, args.output)
    return 0


def _bench_small(eps_list, alpha_list, threads: int):
    rows = []
    failures = 0
    for seed in range(50):
        n = 5 + seed % 6
        m = 1 + seed % 3
        data = generate_instance("euclidean", n, seed)
        g, _ = parse_instance(data)
        budget = 0.12 * n
        table = build_path_cover_table(g, m)
        ub = opt_mop(table, m, budget)
        for eps in eps_list:
            for alpha in alpha_list:
                t0 = time.perf_counter()
                res = solve_mop_report(
                    g, MopParams(m=m, budget=budget, alpha=alpha, eps=eps), threads=threads
                )
                dt = time.perf_counter() - t0
                ps = res.pathset
                if ps.cost > budget + _TOL:
                    failures += 1
                ratio = ps.spanned / ub if ub else ""
                rows.append(
                    {
                        "instance": f"euclidean-n{n}-seed{seed}",
                        "ratio": ratio,
                        "UB": ub,
                        "covered": ps.spanned,
                        "time": f"{dt:.4f}",
                    }
                )
    return rows, failures


def _bench_scaling(eps_list, alpha_list, threads: int):
    rows = []
    failures = 0
    eps = eps_list[0]
    alpha = alpha_list[0]
    for n in (10, 20, 30):
        data = generate_instance("euclidean", n, 1000 + n, sensors=max(2, n // 10))
        g, inst = parse_instance(data)
        t0 = time.perf_counter()
        res = solve_bsc_report(inst, alpha, eps, threads=threads)
        dt = time.perf_counter() - t0
        if not res.report.ok:
            failures += 1
        rows.append(
            {
                "instance": f"euclidean-n{n}-scaling",
                "ratio": "",
                "UB": "",
                "covered": res.report.covered_count,
                "time": f"{dt:.4f}",
            }
        )
    return rows, failures


def _cmd_bench(args: argparse.Namespace) -> int:
    eps_list = [float(x) for x in args.eps.split(",")]
    alpha_list = [float(x) for x in args.alpha.split(",")]
    if args.suite == "small":
        rows, failures = _bench_small(eps_list, alpha_list, args.threads)
    else:
        rows, failures = _bench_scaling(eps_list, alpha_list, args.threads)
    out = args.output or f"bench-{args.suite}.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["instance", "ratio", "UB", "covered", "time"])
        writer.writeheader()
        writer.writerows(rows)
    plot = args.plot or out.rsplit(".", 1)[0] + ".svg"
    ratios = [float(r["ratio"]) for r in rows if r["ratio"] != ""]
    if ratios:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(ratios, bins=20, range=(0.0, max(1.0, max(ratios))), color="#4477aa")
        ax.set_xlabel("covered / oracle optimum")
        ax.set_ylabel("runs")
        ax.set_title(f"suite {args.suite}: {len(ratios)} runs")
        fig.tight_layout()
        fig.savefig(plot)
        plt.close(fig)
    doc = {
        "command": "bench",
        "suite": args.suite,
        "rows": len(rows),
        "csv": out,
        "plot": plot if ratios else None,
        "min_ratio": min(ratios) if ratios else None,
        "failures": failures,
    }
    _emit(doc, None)
    return 0 if failures == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sweepcover",
        description="Budgeted sweep-coverage toolkit: generators, solvers, oracles.",
    )
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def add_common(p, *, threads: bool = True, oracle: bool = False):
        p.add_argument("--input", required=True, help="instance JSON file")
        p.add_argument("--output", help="also write the report to this file")
        p.add_argument("--alpha", type=float, default=ALPHA_STAR)
        p.add_argument("--eps", type=float, default=DEFAULT_EPS)
        if threads:
            p.add_argument("--threads", type=int, default=1)
        if oracle:
            p.add_argument("--oracle", action="store_true", help="attach exact bound")

    p = sub.add_parser("gen", help="generate a deterministic instance file")
    p.add_argument("--kind", required=True, choices=["euclidean", "random-metric", "line", "star"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spacing", type=float, default=1.0, help="line kind: vertex spacing")
    p.add_argument("--sensors", type=int, default=None)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--period", type=float, default=1.0)
    p.add_argument("--output", help="target file; stdout when omitted")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve-kminwp", help="few paths over many vertices, cheaply")
    add_common(p, threads=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_solve_kminwp)

    p = sub.add_parser("solve-mop", help="span the most vertices within a budget")
    add_common(p, oracle=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--budget", type=float, required=True)
    p.set_defaults(func=_cmd_solve_mop)

    p = sub.add_parser("solve-bsc", help="route a sensor fleet over the instance")
    add_common(p, oracle=True)
    p.add_argument("--sensors", type=int, default=None, help="override fleet size")
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--period", type=float, default=1.0)
    p.set_defaults(func=_cmd_solve_bsc)

    p = sub.add_parser("verify", help="recheck a saved schedule against its instance")
    p.add_argument("--input", required=True)
    p.add_argument("--schedule", required=True, help="report file from solve-bsc")
    p.add_argument("--output")
    p.add_argument("--sensors", type=int, default=None)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--period", type=float, default=1.0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="exact small-instance optima")
    p.add_argument("--what", required=True, choices=["kminwp", "pcp", "pcf", "mop", "bsc-ub"])
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--budget", type=float, default=0.0)
    p.add_argument("--penalty", type=float, default=1.0)
    p.add_argument("--sensors", type=int, default=None)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--period", type=float, default=1.0)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("bench", help="randomized suites against the oracles")
    p.add_argument("--suite", required=True, choices=["small", "scaling"])
    p.add_argument("--output", help="CSV path (default bench-<suite>.csv)")
    p.add_argument("--plot", help="histogram SVG path")
    p.add_argument("--alpha", default=f"{ALPHA_STAR:.12f}", help="comma-separated list")
    p.add_argument("--eps", default=str(DEFAULT_EPS), help="comma-separated list")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_bench)
    return ap


def _configure_logging() -> None:
    level = os.environ.get("SWEEPCOVER_LOG", "off").strip().lower()
    if level in ("", "off", "0", "none"):
        return
    chosen = logging.DEBUG if level == "debug" else logging.INFO
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("sweepcover")
    root.addHandler(handler)
    root.setLevel(chosen)


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (GraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
