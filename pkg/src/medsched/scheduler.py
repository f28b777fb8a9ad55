"""Start-time scheduling for morphing groups.

Edges are visited in a configured order and each receives the earliest
integer start that avoids its forbidden period given the already-scheduled
edges.  Forbidden periods come in four levels that build on each other:

* basic        - never pass a point while the opposite stub passes it
* with self    - additionally never overlap a morph of the same edge
* duplication  - the above over a two-cycle horizon, for extra morphs
* allowance    - tolerate up to n simultaneous crossings per edge, counting
                 only crossings that scheduling can influence

Always-crossing points (both stubs cover them at rest) cannot be scheduled
away; they are excluded from the allowance bookkeeping and instead lower the
per-edge budget k_n(e) = max(0, n - #always-crossing points of e).
"""

from __future__ import annotations

import json
import random
from bisect import insort
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import timeline
from .geometry import (
    ALWAYS_CROSSING,
    FULLY_AVOIDABLE,
    SEMI_AVOIDABLE,
    DirectedPoint,
    GraphLayout,
    MorphProfile,
    PointKey,
    ScheduleProblem,
)
from .timeline import EMPTY, UNIVERSE, NoFeasibleTime, TimePeriod


@dataclass(frozen=True)
class SchedulerConfig:
    """Knobs for one scheduling run.

    order is "desc" (longest edge first), "asc", or "seed:<int>" for a
    seeded random permutation.  Ties in length fall back to edge id, so a
    given config always reproduces the same schedule.
    """

    order: str = "desc"
    overlap: bool = False
    duplication: bool = False
    allow_n: int = 0

    def __post_init__(self) -> None:
        if self.allow_n < 0:
            raise ValueError("allow_n must be >= 0")
        if self.order in ("desc", "asc"):
            return
        kind, _, tail = self.order.partition(":")
        if kind != "seed" or not tail:
            raise ValueError(f"unknown order {self.order!r}")
        try:
            int(tail)
        except ValueError:
            raise ValueError(f"order seed must be an integer: {self.order!r}") from None


def order_edges(
    problem: ScheduleProblem, edges: Sequence[object], config: SchedulerConfig
) -> list[object]:
    # Lengths are rounded so float noise cannot reorder same-length edges.
    def key(e: object) -> tuple:
        return (round(problem.layout.edge_length(e), 6), str(e))

    if config.order == "desc":
        return sorted(edges, key=lambda e: (-key(e)[0], key(e)[1]))
    if config.order == "asc":
        return sorted(edges, key=key)
    seed = int(config.order.split(":", 1)[1])
    out = sorted(edges, key=str)
    random.Random(seed).shuffle(out)
    return out


@dataclass
class GroupState:
    """Mutable scheduling state: the problem plus starts assigned so far."""

    problem: ScheduleProblem
    starts: dict[object, list[int]] = field(default_factory=dict)

    def start_list(self, edge: object) -> list[int]:
        return self.starts.get(edge, [])

    def opposite_period(self, dp: DirectedPoint) -> TimePeriod:
        """Times the opposite stub covers the point (grid, all its morphs)."""
        if dp.other_always:
            return UNIVERSE
        if not dp.other_reachable:
            return EMPTY
        ts = self.starts.get(dp.other)
        if not ts:
            return EMPTY
        return TimePeriod.from_intervals(
            (t + dp.other_pass_ms, t + dp.other_ret_ms) for t in ts
        )

    def own_period(self, edge: object, dp: DirectedPoint) -> TimePeriod:
        """Times this edge's stub covers the point (grid, all its morphs)."""
        if dp.always:
            return UNIVERSE
        ts = self.starts.get(edge)
        if not ts:
            return EMPTY
        return TimePeriod.from_intervals((t + dp.pass_ms, t + dp.ret_ms) for t in ts)


def forbidden_basic(state: GroupState, edge: object) -> TimePeriod:
    """Starts that would make this edge's stub pass a point while the
    opposite stub passes it.  Assumes no always-passing opposites; with one
    present the result is the whole line and scheduling raises."""
    parts = []
    for dp in state.problem.points[edge]:
        c = state.opposite_period(dp)
        if not c.is_empty:
            parts.append(timeline.shift_window(c, dp.pass_ms, dp.ret_ms))
    return timeline.union(*parts)


def self_period(state: GroupState, edge: object) -> TimePeriod:
    """Starts that would overlap an existing morph of the same edge."""
    trip = state.problem.trip_ms(edge)
    return TimePeriod.from_intervals((t - trip, t + trip) for t in state.start_list(edge))


def forbidden_with_self(state: GroupState, edge: object) -> TimePeriod:
    return forbidden_basic(state, edge).union(self_period(state, edge))


def forbidden_duplication(state: GroupState, edge: object, cycle: int) -> TimePeriod:
    """Level three: crossing and self avoidance over a two-cycle horizon."""
    return timeline.widen_cycle(cycle, forbidden_with_self(state, edge))


def controllable_number(problem: ScheduleProblem, edge: object, n: int) -> int:
    """Crossing budget left for this edge once unavoidable ones are paid for."""
    return max(0, n - problem.always_crossing_count[edge])


def crit_allowance(state: GroupState, edge: object, k: int) -> TimePeriod:
    """Starts that would raise this edge's simultaneous crossing count above k.

    k = 0 keeps the basic rule for every point whose opposite period is
    bounded (an always-passing opposite makes the crossing unavoidable, so
    such points cannot constrain the start) and additionally forbids starts
    that line up two semi-avoidable crossings at once.

    k >= 1 forbids starts for which some instant sees k+1 candidate points
    crossing together.  Candidate points are the non-always-crossing ones
    with a live opposite period.  Because the stub covers all its points in
    nested windows centered mid-morph, the subset union over (k+1)-subsets
    collapses to a depth sweep keyed on the most-restrictive member.
    """
    pts = state.problem.points[edge]
    if k == 0:
        parts = []
        for dp in pts:
            c = state.opposite_period(dp)
            if not (c.is_empty or c.is_universe):
                parts.append(timeline.shift_window(c, dp.pass_ms, dp.ret_ms))
        semis = [dp for dp in pts if dp.point_class == SEMI_AVOIDABLE]
        for dp1, dp2 in combinations(semis, 2):
            both = state.opposite_period(dp1).intersect(state.opposite_period(dp2))
            if both.is_empty or both.is_universe:
                continue
            parts.append(
                timeline.shift_window(both, dp1.pass_ms, dp1.ret_ms).intersect(
                    timeline.shift_window(both, dp2.pass_ms, dp2.ret_ms)
                )
            )
        return timeline.union(*parts)

    cand = []
    for dp in pts:
        if dp.point_class == ALWAYS_CROSSING:
            continue
        c = state.opposite_period(dp)
        if not c.is_empty:
            cand.append((dp, c))
    if len(cand) <= k:
        return EMPTY
    cand.sort(key=lambda it: (it[0].pass_ms, str(it[0].point)))
    periods = [c for _, c in cand]
    # Every (k+1)-subset is handled at its widest-window member j, so all
    # other members come from the prefix before j.
    nonuniverse = EMPTY
    for _, c in cand[:k]:
        if not c.is_universe:
            nonuniverse = nonuniverse.union(c)
    parts = []
    for j in range(k, len(cand)):
        dpj, cj = cand[j]
        g = cj.intersect(timeline.depth_at_least(periods[: j + 1], k + 1))
        if cj.is_universe:
            # A subset made only of unavoidable crossings never constrains
            # the start, so demand one controllable member.
            g = g.intersect(nonuniverse)
        if not g.is_empty:
            parts.append(timeline.shift_window(g, dpj.pass_ms, dpj.ret_ms))
        if not cj.is_universe:
            nonuniverse = nonuniverse.union(cj)
    return timeline.union(*parts)


def _opst_sub(state: GroupState, other: object, point: PointKey, n: int) -> TimePeriod:
    """Times when passing `point` would overload the opposite edge `other`.

    Three cases: with no budget and an avoidable point the whole passing
    period of `other` is off limits; with no budget at a point `other`
    always covers, any live crossing elsewhere on `other` blocks it; with
    budget k the block is the time when k crossings on `other` already
    coincide.
    """
    problem = state.problem
    k2 = controllable_number(problem, other, n)
    dp_at = problem.point_view[other].get(point)
    if k2 == 0:
        if dp_at is None or not dp_at.always:
            return EMPTY if dp_at is None else state.own_period(other, dp_at)
        xs = [
            state.own_period(other, dp2).intersect(state.opposite_period(dp2))
            for dp2 in problem.points[other]
            if dp2.point_class in (FULLY_AVOIDABLE, SEMI_AVOIDABLE)
        ]
        return timeline.union(*xs)
    xs = []
    for dp2 in problem.points[other]:
        if dp2.point_class == ALWAYS_CROSSING:
            continue
        if not (dp2.other_always or state.starts.get(dp2.other)):
            continue
        xs.append(state.own_period(other, dp2).intersect(state.opposite_period(dp2)))
    return timeline.depth_at_least(xs, k2)


def opst_allowance(state: GroupState, edge: object, n: int) -> TimePeriod:
    """Starts that would push some opposite edge over its own budget."""
    parts = []
    for dp in state.problem.points[edge]:
        if dp.always:
            continue  # this edge cannot decline to pass the point anyway
        sub = _opst_sub(state, dp.other, dp.point, n)
        if not sub.is_empty:
            parts.append(timeline.shift_window(sub, dp.pass_ms, dp.ret_ms))
    return timeline.union(*parts)


def forbidden_allowance(state: GroupState, edge: object, cycle: int, n: int) -> TimePeriod:
    """Level four: own budget, self overlap, and opposite budgets, over a
    two-cycle horizon when a cycle is known."""
    k = controllable_number(state.problem, edge, n)
    base = timeline.union(
        crit_allowance(state, edge, k),
        self_period(state, edge),
        opst_allowance(state, edge, n),
    )
    return timeline.widen_cycle(cycle, base)


@dataclass
class GroupSchedule:
    """Schedule of one morphing group; repeats independently every t_cycle ms."""

    edges: tuple
    starts: dict[object, tuple[int, ...]]
    t_total: int
    t_cycle: int


@dataclass
class Schedule:
    """Drawing-level schedule with per-group detail.

    t_total and t_cycle are the maxima over groups; each group replays with
    its own cycle.
    """

    starts: dict[object, tuple[int, ...]]
    t_total: int
    t_cycle: int
    allowable_n: int
    controllable: dict[object, int]
    groups: tuple[GroupSchedule, ...]
    profile: MorphProfile | None = None

    @property
    def morph_count(self) -> int:
        return sum(len(ts) for ts in self.starts.values())

    def group_cycle(self, edge: object) -> int:
        for gs in self.groups:
            if edge in gs.starts:
                return gs.t_cycle
        return self.t_cycle

    def to_json(self) -> dict:
        obj: dict = {
            "edges": {str(e): list(ts) for e, ts in self.starts.items()},
            "t_total": self.t_total,
            "t_cycle": self.t_cycle,
            "n": self.allowable_n,
            "k": {str(e): v for e, v in self.controllable.items()},
            "groups": [
                {
                    "edges": [str(e) for e in gs.edges],
                    "starts": {str(e): list(ts) for e, ts in gs.starts.items()},
                    "t_total": gs.t_total,
                    "t_cycle": gs.t_cycle,
                }
                for gs in self.groups
            ],
        }
        if self.profile is not None:
            obj["profile"] = {
                "delta": self.profile.delta,
                "eta": self.profile.eta,
                "speed": self.profile.speed,
                "pause": self.profile.pause,
            }
        return obj

    @staticmethod
    def from_json(obj: dict, layout: GraphLayout | None = None) -> "Schedule":
        def resolve(key: str) -> object:
            return ids.get(key, key)

        ids: dict[str, object] = {}
        if layout is not None:
            ids = {str(e.id): e.id for e in layout.edges}
        starts = {resolve(k): tuple(v) for k, v in obj["edges"].items()}
        groups = tuple(
            GroupSchedule(
                tuple(resolve(e) for e in g["edges"]),
                {resolve(k): tuple(v) for k, v in g["starts"].items()},
                g["t_total"],
                g["t_cycle"],
            )
            for g in obj.get("groups", [])
        )
        profile = None
        if "profile" in obj:
            p = obj["profile"]
            profile = MorphProfile(p["delta"], p["eta"], p["speed"], int(p["pause"]))
        return Schedule(
            starts,
            obj["t_total"],
            obj["t_cycle"],
            obj.get("n", 0),
            {resolve(k): v for k, v in obj.get("k", {}).items()},
            groups,
            profile,
        )

    @staticmethod
    def load(path: str, layout: GraphLayout | None = None) -> "Schedule":
        with open(path, encoding="utf-8") as fh:
            return Schedule.from_json(json.load(fh), layout)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def _run_greedy(
    problem: ScheduleProblem,
    group: Sequence[object],
    config: SchedulerConfig,
    forbidden: Callable[[GroupState, object], TimePeriod],
) -> GroupSchedule:
    state = GroupState(problem, {e: [] for e in group})
    for e in order_edges(problem, group, config):
        try:
            t = timeline.t_earliest(forbidden(state, e))
        except NoFeasibleTime as exc:
            raise NoFeasibleTime(f"edge {e}: {exc}") from exc
        state.starts[e].append(t)
    t_total = max(
        (ts[-1] + problem.trip_ms(e) for e, ts in state.starts.items() if ts), default=0
    )
    return GroupSchedule(
        tuple(group), {e: tuple(ts) for e, ts in state.starts.items()}, t_total, t_total
    )


def schedule_basic(
    problem: ScheduleProblem, group: Sequence[object], config: SchedulerConfig
) -> GroupSchedule:
    """Greedy pass with plain crossing avoidance.

    Raises NoFeasibleTime when an always-passing opposite makes avoidance
    impossible; use schedule_with_allowance for such instances.
    """
    return _run_greedy(problem, group, config, forbidden_basic)


def schedule_with_allowance(
    problem: ScheduleProblem,
    group: Sequence[object],
    config: SchedulerConfig,
    n: int | None = None,
) -> GroupSchedule:
    """Greedy pass with per-edge crossing budgets.

    With n = 0 on an instance free of always-passing points this reproduces
    schedule_basic exactly.
    """
    nn = config.allow_n if n is None else n
    return _run_greedy(
        problem, group, config, lambda st, e: forbidden_allowance(st, e, 0, nn)
    )


def shorten_cycle(
    problem: ScheduleProblem,
    group: Sequence[object],
    starts: dict[object, Sequence[int]],
    n: int = 0,
) -> int:
    """Smallest replay period justified by per-edge backward slack.

    For each edge, the latest negative start its forbidden period would have
    allowed bounds how far the previous cycle may reach forward; the cycle
    is the worst such gap.  The grid search makes this 1 ms conservative,
    so a crossing-free edge yields trip + 1 rather than trip.
    """
    state = GroupState(problem, {e: list(ts) for e, ts in starts.items()})
    worst = 0
    for e in group:
        if not starts.get(e):
            continue
        fb = forbidden_allowance(state, e, 0, n)
        worst = max(worst, min(starts[e]) - timeline.t_latest(fb))
    return worst


def schedule_duplication(
    problem: ScheduleProblem,
    group: Sequence[object],
    base: GroupSchedule,
    t_total: int,
    t_cycle: int,
    config: SchedulerConfig,
) -> GroupSchedule:
    """Add repeat morphs wherever one still fits before t_total.

    Candidate starts are checked over a two-cycle horizon so an accepted
    morph also clears the next cycle's copies.  Rounds continue while any
    edge accepts.
    """
    state = GroupState(problem, {e: list(base.starts.get(e, ())) for e in group})
    active = list(group)
    while active:
        accepted = []
        for e in order_edges(problem, active, config):
            fb = forbidden_allowance(state, e, t_cycle, config.allow_n)
            try:
                t2 = timeline.t_earliest(fb)
            except NoFeasibleTime:
                continue
            if t2 + problem.trip_ms(e) <= t_total:
                insort(state.starts[e], t2)
                accepted.append(e)
        active = accepted
    return GroupSchedule(
        tuple(group), {e: tuple(ts) for e, ts in state.starts.items()}, t_total, t_cycle
    )


def repair_overlap_allowance(
    problem: ScheduleProblem, gs: GroupSchedule, n: int
) -> int:
    """Extend a tentative cycle until replay satisfies every edge budget.

    Each round adds the total violating duration; t_total is always a valid
    fallback because cycles then no longer interact.
    """
    from . import validator

    cycle = gs.t_cycle
    while cycle < gs.t_total:
        excess = validator.violation_duration_ms(
            problem.layout, problem.profile, gs.starts, cycle, n, problem=problem
        )
        if excess <= 0:
            break
        cycle = min(gs.t_total, cycle + excess)
    return cycle


def schedule_group(
    problem: ScheduleProblem, group: Sequence[object], config: SchedulerConfig
) -> GroupSchedule:
    """Full pipeline for one group: greedy pass, optional cycle shortening
    with repair, optional duplication."""
    gs = schedule_with_allowance(problem, group, config)
    if config.overlap:
        # Cycling at t_total is plain sequential replay, so never go past it.
        cycle = min(shorten_cycle(problem, group, gs.starts, config.allow_n), gs.t_total)
        gs = replace(gs, t_cycle=cycle)
        gs = replace(gs, t_cycle=repair_overlap_allowance(problem, gs, config.allow_n))
    if config.duplication:
        gs = schedule_duplication(problem, group, gs, gs.t_total, gs.t_cycle, config)
        if config.overlap:
            gs = replace(gs, t_cycle=repair_overlap_allowance(problem, gs, config.allow_n))
    return gs


def schedule_drawing(problem: ScheduleProblem, config: SchedulerConfig) -> Schedule:
    """Schedule every morphing group independently and merge the results."""
    group_schedules = tuple(schedule_group(problem, g, config) for g in problem.groups)
    starts: dict[object, tuple[int, ...]] = {}
    for gs in group_schedules:
        starts.update(gs.starts)
    return Schedule(
        starts,
        max((gs.t_total for gs in group_schedules), default=0),
        max((gs.t_cycle for gs in group_schedules), default=0),
        config.allow_n,
        {e: controllable_number(problem, e, config.allow_n) for e in problem.points},
        group_schedules,
        problem.profile,
    )
