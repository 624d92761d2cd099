"""Budgeted sweep coverage toolkit.

Pipeline: prize-collecting forest and path solvers feed a bicriteria
minimum-weight multi-path solver, which feeds a budgeted multi-path
orienteering approximation, which feeds the sweep-coverage scheduler.
An exponential oracle certifies everything at desk scale.
"""

from .graph import (
    BscInstance,
    GraphError,
    MetricGraph,
    Path,
    PathSet,
    euclidean_graph,
    load_instance,
    make_path,
    make_pathset,
    metric_closure,
    normalize,
    normalize_graph,
    parse_instance,
    path_weight,
    validate_pathset,
)
from .kminwp import (
    BicriteriaSolution,
    GuessResult,
    SolutionMode,
    guess_budget,
    solve_kminwp,
    split_path,
    trim,
)
from .mop import (
    ALPHA_STAR,
    MopParams,
    MopResult,
    bicriteria_fraction,
    feasible_fraction,
    guaranteed_fraction,
    heaviest_subpath,
    solve_mop,
    solve_mop_report,
)
from .prize_collecting import (
    Forest,
    LmpCertificate,
    solve_pcf,
    solve_pcp,
    tree_to_path,
)
from .sweep import (
    Allocation,
    Assignment,
    BscResult,
    CoverageReport,
    LineInstance,
    Schedule,
    allocate_sensors,
    line_counts,
    richest_blocks,
    solve_bsc,
    solve_bsc_report,
    solve_line,
    verify_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_STAR",
    "Allocation",
    "Assignment",
    "BicriteriaSolution",
    "BscInstance",
    "BscResult",
    "CoverageReport",
    "Forest",
    "GraphError",
    "GuessResult",
    "LineInstance",
    "LmpCertificate",
    "MetricGraph",
    "MopParams",
    "MopResult",
    "Path",
    "PathSet",
    "Schedule",
    "SolutionMode",
    "allocate_sensors",
    "bicriteria_fraction",
    "euclidean_graph",
    "feasible_fraction",
    "guaranteed_fraction",
    "guess_budget",
    "heaviest_subpath",
    "line_counts",
    "load_instance",
    "make_path",
    "make_pathset",
    "metric_closure",
    "normalize",
    "normalize_graph",
    "parse_instance",
    "path_weight",
    "richest_blocks",
    "solve_bsc",
    "solve_bsc_report",
    "solve_kminwp",
    "solve_line",
    "solve_mop",
    "solve_mop_report",
    "solve_pcf",
    "solve_pcp",
    "split_path",
    "tree_to_path",
    "trim",
    "validate_pathset",
    "verify_schedule",
]
