"""Command line front end.

Exit codes: 0 success (and, for validate, a valid schedule), 1 infeasible
or invalid schedule, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness, render, validator
from .geometry import (
    GraphLayout,
    LayoutError,
    MorphProfile,
    ScheduleProblem,
    generate_circle_layout,
)
from .scheduler import Schedule, SchedulerConfig, schedule_drawing
from .timeline import NoFeasibleTime


def _profile_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, required=True, help="rest stub ratio")
    p.add_argument("--eta", type=float, default=0.5, help="peak stub ratio")
    p.add_argument("--speed", type=float, default=100.0, help="tip speed px/s")
    p.add_argument("--pause", type=int, default=100, help="peak pause ms")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="medsched",
        description="Morphing edge drawing scheduler and experiment runner",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="compute a schedule for a layout")
    p.add_argument("--layout", required=True)
    _profile_args(p)
    p.add_argument("--overlap", action="store_true", help="shorten the replay cycle")
    p.add_argument("--duplicate", action="store_true", help="add repeat morphs")
    p.add_argument("--allow", type=int, default=0, metavar="N",
                   help="crossings tolerated per edge")
    p.add_argument("--order", default="desc", help="desc, asc, or seed:<int>")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("validate", help="replay-check a schedule")
    p.add_argument("--layout", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--allow", type=int, default=None, metavar="N")

    p = sub.add_parser("experiment", help="run the study sweeps")
    p.add_argument("--preset", choices=("paper", "ci"), default="paper")
    p.add_argument("--orders", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="CSV path")

    p = sub.add_parser("render", help="write SVG frames of stub states")
    p.add_argument("--layout", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--times", required=True, help="comma-separated ms values")
    p.add_argument("-o", "--output", required=True, help="output directory")

    p = sub.add_parser("generate", help="complete graph on a circle")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--radius", type=float, default=200.0)
    p.add_argument("-o", "--output", required=True)

    return ap


def _cmd_schedule(args: argparse.Namespace) -> int:
    layout = GraphLayout.load(args.layout)
    profile = MorphProfile(args.delta, args.eta, args.speed, args.pause)
    problem = ScheduleProblem(layout, profile)
    config = SchedulerConfig(
        order=args.order,
        overlap=args.overlap,
        duplication=args.duplicate,
        allow_n=args.allow,
    )
    try:
        sched = schedule_drawing(problem, config)
    except NoFeasibleTime as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    sched.save(args.output)
    print(
        f"{len(layout.edges)} edges, {sched.morph_count} morphs, "
        f"t_total={sched.t_total}ms, t_cycle={sched.t_cycle}ms -> {args.output}"
    )
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    layout = GraphLayout.load(args.layout)
    sched = Schedule.load(args.schedule, layout)
    if sched.profile is None:
        print("schedule file carries no stub profile", file=sys.stderr)
        return 2
    report = validator.validate(layout, sched.profile, sched, n=args.allow)
    print(json.dumps(report.to_json(), indent=2))
    return 0 if report.ok else 1


def _cmd_experiment(args: argparse.Namespace) -> int:
    from dataclasses import replace

    config = harness.PAPER_PRESET if args.preset == "paper" else harness.CI_PRESET
    if args.orders is not None:
        config = replace(config, orders=args.orders)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    try:
        rows = harness.run_experiment(config, csv_path=args.output, workers=args.workers)
    except harness.ExperimentFailure as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1
    print(f"{len(rows)} rows -> {args.output}")
    for study in config.studies:
        for nodes in config.node_counts:
            try:
                med = harness.pooled_median(rows, study, nodes)
            except ValueError:
                continue
            print(f"  {study} K{nodes}: median {med:.3f}")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    layout = GraphLayout.load(args.layout)
    sched = Schedule.load(args.schedule, layout)
    times = [int(x) for x in args.times.split(",") if x.strip() != ""]
    paths = render.render_frames(layout, sched, times, args.output)
    print(f"{len(paths)} frames -> {args.output}")
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    layout = generate_circle_layout(args.nodes, args.radius)
    layout.save(args.output)
    print(f"{len(layout.nodes)} nodes, {len(layout.edges)} edges -> {args.output}")
    return 0


_COMMANDS = {
    "schedule": _cmd_schedule,
    "validate": _cmd_validate,
    "experiment": _cmd_experiment,
    "render": _cmd_render,
    "generate": _cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (LayoutError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
