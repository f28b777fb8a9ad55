"""Experiment runner for the circle-graph scheduling studies.

One run = complete graph on a circle, one stub profile, one edge order,
one allowance budget.  From a single greedy base schedule the runner
derives the overlap study (shortened replay cycle vs. total time) and the
duplication study (edges vs. morphs with the cycle kept at full length);
the allowance study reads the overlap cycles at different budgets against
the budget-0 cycle of the same order.

Samples are pooled across allowance values 0..n_cap per node count, where
n_cap stops one short of the busiest edge's crossing count: beyond that
the budget can never bind again and rows would only duplicate.

Every schedule is validated against the continuous-time replay before its
row is emitted; a failure aborts the experiment and leaves diagnostic
JSON artifacts.
"""

from __future__ import annotations

import csv
import json
import os
import statistics
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from . import validator
from .geometry import GraphLayout, MorphProfile, ScheduleProblem, generate_circle_layout
from .scheduler import (
    GroupSchedule,
    Schedule,
    SchedulerConfig,
    controllable_number,
    repair_overlap_allowance,
    schedule_duplication,
    schedule_with_allowance,
    shorten_cycle,
)

CSV_VERSION = "medsched-results v1"


@dataclass(frozen=True)
class ExperimentConfig:
    node_counts: tuple[int, ...] = (7, 8, 9, 10, 11, 12, 13)
    deltas: tuple[float, ...] = (0.04, 0.09, 0.16, 0.25)
    radius: float = 200.0
    speed: float = 100.0
    pause: int = 100
    eta: float = 0.5
    orders: int = 100
    n_max: int = 10
    master_seed: int = 71
    studies: tuple[str, ...] = ("overlap", "duplication", "allowance")
    artifact_dir: str = "medsched-failure"

    def __post_init__(self) -> None:
        if self.orders < 2:
            raise ValueError("need at least the two deterministic orders")
        if self.n_max < 0 or self.radius <= 0 or self.speed <= 0:
            raise ValueError("parameters must be positive")
        unknown = set(self.studies) - {"overlap", "duplication", "allowance"}
        if unknown:
            raise ValueError(f"unknown studies: {sorted(unknown)}")

    def order_labels(self) -> list[str]:
        labels = ["desc", "asc"]
        labels += [
            f"seed:{self.master_seed * 1000 + i}" for i in range(2, self.orders)
        ]
        return labels[: self.orders]


PAPER_PRESET = ExperimentConfig()
CI_PRESET = ExperimentConfig(orders=10)


@dataclass
class ResultRow:
    study: str
    nodes: int
    delta: float
    order_index: int
    order_label: str
    overlap: bool
    duplication: bool
    allow_n: int
    edges: int
    morphs: int
    t_total: int
    t_cycle: int
    overlap_ratio: float | None = None
    duplication_ratio: float | None = None
    allowance_ratio: float | None = None
    valid: bool = True

    CSV_FIELDS = (
        "study",
        "nodes",
        "delta",
        "order_index",
        "order_label",
        "overlap",
        "duplication",
        "allow_n",
        "edges",
        "morphs",
        "t_total_ms",
        "t_cycle_ms",
        "overlap_ratio",
        "duplication_ratio",
        "allowance_ratio",
        "valid",
    )

    def to_csv(self) -> list[str]:
        def ratio(x: float | None) -> str:
            return "" if x is None else f"{x:.6f}"

        return [
            self.study,
            str(self.nodes),
            f"{self.delta:g}",
            str(self.order_index),
            self.order_label,
            str(int(self.overlap)),
            str(int(self.duplication)),
            str(self.allow_n),
            str(self.edges),
            str(self.morphs),
            str(self.t_total),
            str(self.t_cycle),
            ratio(self.overlap_ratio),
            ratio(self.duplication_ratio),
            ratio(self.allowance_ratio),
            str(int(self.valid)),
        ]


class ExperimentFailure(RuntimeError):
    """A schedule failed replay validation; artifacts were written."""


def allowance_cap(problem: ScheduleProblem, n_max: int = 10) -> int:
    """Largest budget that can still bind on this instance.

    Once the budget reaches the busiest edge's crossing count the forbidden
    periods stop changing, so sweeps need not go past one below it.
    """
    per_edge: dict[object, int] = {}
    for rec in problem.records:
        per_edge[rec.edge] = per_edge.get(rec.edge, 0) + 1
    busiest = max(per_edge.values(), default=0)
    return min(n_max, max(0, busiest - 1))


def quartiles(values: Sequence[float]) -> tuple[float, float, float]:
    """(Q1, median, Q3) with linear interpolation between order statistics."""
    if not values:
        raise ValueError("quartiles of empty data")
    if len(values) == 1:
        v = float(values[0])
        return (v, v, v)
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return (q1, q2, q3)


def _drawing_from_groups(
    problem: ScheduleProblem, groups: Sequence[GroupSchedule], n: int
) -> Schedule:
    starts: dict[object, tuple[int, ...]] = {}
    for gs in groups:
        starts.update(gs.starts)
    return Schedule(
        starts,
        max((gs.t_total for gs in groups), default=0),
        max((gs.t_cycle for gs in groups), default=0),
        n,
        {e: controllable_number(problem, e, n) for e in problem.points},
        tuple(groups),
        problem.profile,
    )


def _check(
    problem: ScheduleProblem,
    schedule: Schedule,
    n: int,
    config: ExperimentConfig,
    context: str,
) -> None:
    report = validator.validate(
        problem.layout, problem.profile, schedule, n=n, problem=problem
    )
    if report.ok:
        return
    os.makedirs(config.artifact_dir, exist_ok=True)
    problem.layout.save(os.path.join(config.artifact_dir, "layout.json"))
    schedule.save(os.path.join(config.artifact_dir, "schedule.json"))
    with open(
        os.path.join(config.artifact_dir, "report.json"), "w", encoding="utf-8"
    ) as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
    raise ExperimentFailure(
        f"validation failed for {context}; artifacts in {config.artifact_dir}/"
    )


def _run_cell(
    config: ExperimentConfig, nodes: int, delta: float
) -> list[ResultRow]:
    """All rows for one (node count, delta) cell."""
    layout = generate_circle_layout(nodes, config.radius)
    profile = MorphProfile(delta, config.eta, config.speed, config.pause)
    problem = ScheduleProblem(layout, profile)
    cap = allowance_cap(problem, config.n_max)
    edges = len(layout.edges)
    rows: list[ResultRow] = []
    want_overlap = "overlap" in config.studies or "allowance" in config.studies
    want_dup = "duplication" in config.studies

    for order_index, label in enumerate(config.order_labels()):
        base_cycles: dict[int, int] = {}
        for n in range(cap + 1):
            cfg = SchedulerConfig(order=label, allow_n=n)
            base_groups = [
                schedule_with_allowance(problem, g, cfg) for g in problem.groups
            ]
            t_total = max((gs.t_total for gs in base_groups), default=0)
            morphs = sum(
                len(ts) for gs in base_groups for ts in gs.starts.values()
            )

            if want_overlap:
                shortened = []
                for gs in base_groups:
                    cyc = shorten_cycle(problem, gs.edges, gs.starts, n)
                    gs2 = replace(gs, t_cycle=cyc)
                    gs2 = replace(
                        gs2, t_cycle=repair_overlap_allowance(problem, gs2, n)
                    )
                    shortened.append(gs2)
                sched = _drawing_from_groups(problem, shortened, n)
                _check(
                    problem, sched, n, config,
                    f"overlap nodes={nodes} delta={delta} order={label} n={n}",
                )
                base_cycles[n] = sched.t_cycle
                if "overlap" in config.studies:
                    rows.append(
                        ResultRow(
                            "overlap", nodes, delta, order_index, label,
                            True, False, n, edges, morphs,
                            sched.t_total, sched.t_cycle,
                            overlap_ratio=sched.t_cycle / sched.t_total,
                        )
                    )

            if want_dup:
                dup_cfg = replace(cfg, duplication=True)
                dup_groups = [
                    schedule_duplication(
                        problem, gs.edges, gs, gs.t_total, gs.t_total, dup_cfg
                    )
                    for gs in base_groups
                ]
                sched = _drawing_from_groups(problem, dup_groups, n)
                _check(
                    problem, sched, n, config,
                    f"duplication nodes={nodes} delta={delta} order={label} n={n}",
                )
                rows.append(
                    ResultRow(
                        "duplication", nodes, delta, order_index, label,
                        False, True, n, edges, sched.morph_count,
                        sched.t_total, sched.t_cycle,
                        duplication_ratio=edges / sched.morph_count,
                    )
                )

        if "allowance" in config.studies and base_cycles:
            base = base_cycles[0]
            for n, cyc in sorted(base_cycles.items()):
                rows.append(
                    ResultRow(
                        "allowance", nodes, delta, order_index, label,
                        True, False, n, edges, edges,
                        0, cyc,
                        allowance_ratio=cyc / base,
                    )
                )
    return rows


def run_experiment(
    config: ExperimentConfig,
    csv_path: str | None = None,
    workers: int = 1,
) -> list[ResultRow]:
    """Run every configured cell and return rows in deterministic order."""
    cells = sorted(
        (nodes, delta) for nodes in config.node_counts for delta in config.deltas
    )
    if workers > 1:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            chunks = pool.starmap(
                _run_cell, [(config, n, d) for n, d in cells]
            )
    else:
        chunks = [_run_cell(config, n, d) for n, d in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(
        key=lambda r: (r.study, r.nodes, r.delta, r.order_index, r.allow_n)
    )
    if csv_path is not None:
        write_csv(rows, csv_path, config)
    return rows


def write_csv(
    rows: Iterable[ResultRow], path: str, config: ExperimentConfig | None = None
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {CSV_VERSION}")
        if config is not None:
            fh.write(
                f"; orders={config.orders} seed={config.master_seed}"
                f" nodes={','.join(map(str, config.node_counts))}"
            )
        fh.write("\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ResultRow.CSV_FIELDS)
        for row in rows:
            writer.writerow(row.to_csv())


def read_csv(path: str) -> list[ResultRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                ResultRow(
                    rec["study"],
                    int(rec["nodes"]),
                    float(rec["delta"]),
                    int(rec["order_index"]),
                    rec["order_label"],
                    rec["overlap"] == "1",
                    rec["duplication"] == "1",
                    int(rec["allow_n"]),
                    int(rec["edges"]),
                    int(rec["morphs"]),
                    int(rec["t_total_ms"]),
                    int(rec["t_cycle_ms"]),
                    float(rec["overlap_ratio"]) if rec["overlap_ratio"] else None,
                    float(rec["duplication_ratio"])
                    if rec["duplication_ratio"]
                    else None,
                    float(rec["allowance_ratio"])
                    if rec["allowance_ratio"]
                    else None,
                    rec["valid"] == "1",
                )
            )
    return rows


def pooled_median(
    rows: Iterable[ResultRow], study: str, nodes: int, allow_n: int | None = None
) -> float:
    """Median of the study's ratio over every matching row."""
    attr = {
        "overlap": "overlap_ratio",
        "duplication": "duplication_ratio",
        "allowance": "allowance_ratio",
    }[study]
    vals = [
        getattr(r, attr)
        for r in rows
        if r.study == study
        and r.nodes == nodes
        and (allow_n is None or r.allow_n == allow_n)
        and getattr(r, attr) is not None
    ]
    if not vals:
        raise ValueError(f"no rows for {study} nodes={nodes} n={allow_n}")
    return statistics.median(vals)
