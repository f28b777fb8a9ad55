"""Morphing edge drawing scheduler.

Graphs are drawn with partial edges (stubs) that periodically stretch to
full length and shrink back.  This package computes when each edge's morph
should start so that stub crossings are avoided, or kept within a per-edge
budget, and ships a continuous-time validator plus an experiment harness.
"""

from .geometry import (
    ALWAYS_CROSSING,
    ALWAYS_PASSING,
    AVOIDABLE,
    FULLY_AVOIDABLE,
    SEMI_AVOIDABLE,
    Edge,
    GraphLayout,
    IntersectionRecord,
    LayoutError,
    MorphProfile,
    Node,
    ScheduleProblem,
    StubMotion,
    classify_intersections,
    compute_intersections,
    generate_circle_layout,
    morphing_groups,
    stub_motions,
)
from .scheduler import (
    GroupSchedule,
    GroupState,
    Schedule,
    SchedulerConfig,
    controllable_number,
    crit_allowance,
    forbidden_allowance,
    forbidden_basic,
    forbidden_duplication,
    forbidden_with_self,
    opst_allowance,
    order_edges,
    repair_overlap_allowance,
    schedule_basic,
    schedule_drawing,
    schedule_duplication,
    schedule_group,
    schedule_with_allowance,
    shorten_cycle,
)
from .harness import (
    CI_PRESET,
    PAPER_PRESET,
    ExperimentConfig,
    ExperimentFailure,
    ResultRow,
    allowance_cap,
    pooled_median,
    quartiles,
    run_experiment,
)
from .render import render_frames
from .timeline import (
    EMPTY,
    UNIVERSE,
    NoFeasibleTime,
    TimePeriod,
    depth_at_least,
    shift_window,
    t_earliest,
    t_latest,
    widen_cycle,
)
from .validator import ValidationReport, brute_force_forbidden, stub_ratio_at, validate

__version__ = "0.1.0"

__all__ = [
    "ALWAYS_CROSSING",
    "ALWAYS_PASSING",
    "AVOIDABLE",
    "CI_PRESET",
    "EMPTY",
    "FULLY_AVOIDABLE",
    "PAPER_PRESET",
    "SEMI_AVOIDABLE",
    "UNIVERSE",
    "Edge",
    "ExperimentConfig",
    "ExperimentFailure",
    "ResultRow",
    "ValidationReport",
    "GraphLayout",
    "GroupSchedule",
    "GroupState",
    "IntersectionRecord",
    "LayoutError",
    "MorphProfile",
    "NoFeasibleTime",
    "Node",
    "Schedule",
    "SchedulerConfig",
    "ScheduleProblem",
    "StubMotion",
    "TimePeriod",
    "allowance_cap",
    "brute_force_forbidden",
    "classify_intersections",
    "compute_intersections",
    "controllable_number",
    "crit_allowance",
    "depth_at_least",
    "forbidden_allowance",
    "forbidden_basic",
    "forbidden_duplication",
    "forbidden_with_self",
    "generate_circle_layout",
    "morphing_groups",
    "opst_allowance",
    "order_edges",
    "pooled_median",
    "quartiles",
    "render_frames",
    "repair_overlap_allowance",
    "run_experiment",
    "schedule_basic",
    "schedule_drawing",
    "schedule_duplication",
    "schedule_group",
    "schedule_with_allowance",
    "shift_window",
    "shorten_cycle",
    "stub_motions",
    "stub_ratio_at",
    "t_earliest",
    "t_latest",
    "validate",
    "widen_cycle",
]
