"""Continuous-time replay validation and brute-force cross-checks.

The scheduler works on a millisecond grid rounded conservatively; this
module re-derives stub coverage from the raw float geometry, replays each
group over three cycles, and measures the middle cycle.  Because the grid
windows enclose the real ones, a schedule accepted on the grid must also
validate here; a failure means a real bug, not rounding noise.

brute_force_forbidden re-evaluates forbidden start periods point by point
on the integer grid without any interval algebra, as an independent oracle
for the scheduler's period constructions.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from math import ceil
from typing import Iterable, Sequence

from .geometry import (
    ALWAYS_CROSSING,
    FULLY_AVOIDABLE,
    SEMI_AVOIDABLE,
    GraphLayout,
    MorphProfile,
    ScheduleProblem,
)

ALWAYS = "always"

# Exact-arithmetic tangencies (one cover ending exactly when another begins)
# come out as +-1e-9 ms slivers in floats; anything below this threshold is
# treated as a touch, not an overlap.  Real violations are >= 1 ms by
# construction of the integer grid.
_EPS_MS = 1e-6


def stub_ratio_at(profile: MorphProfile, length: float, phase_ms: float) -> float:
    """Stub length ratio at a time offset into one morph (ms).

    Outside [0, trip) the stub rests at delta.  The profile is a tent:
    linear stretch to eta, a pause fully stretched, linear shrink back.
    """
    rise = 1000.0 * (profile.eta - profile.delta) * length / profile.speed
    total = 2.0 * rise + profile.pause
    if phase_ms < 0 or phase_ms >= total:
        return profile.delta
    if phase_ms <= rise:
        return profile.delta + (profile.eta - profile.delta) * phase_ms / rise
    if phase_ms <= rise + profile.pause:
        return profile.eta
    return profile.delta + (profile.eta - profile.delta) * (total - phase_ms) / rise


def edge_ratio_at(
    profile: MorphProfile, length: float, starts: Iterable[float], t_ms: float
) -> float:
    """Stub ratio of an edge at absolute time, given its morph starts."""
    return max(
        (stub_ratio_at(profile, length, t_ms - s) for s in starts),
        default=profile.delta,
    )


def _real_cover(
    profile: MorphProfile, length: float, d: float, starts: Sequence[float]
):
    """Real-valued times a stub covers a point at distance d from its end.

    Returns ALWAYS for a resting cover, else half-open float intervals, one
    per morph.  The boundary d = delta*L counts as covered at rest, matching
    the classification rule.
    """
    dl = profile.delta * length
    if d <= dl:
        return ALWAYS
    if d > profile.eta * length:
        return []
    pass_ms = 1000.0 * (d - dl) / profile.speed
    rise = 1000.0 * (profile.eta - profile.delta) * length / profile.speed
    total = 2.0 * rise + profile.pause
    ret_ms = total - pass_ms
    return [(s + pass_ms, s + ret_ms) for s in starts if pass_ms < ret_ms - _EPS_MS]


def _intersect_lists(a, b):
    if a == ALWAYS:
        return list(b) if b != ALWAYS else ALWAYS
    if b == ALWAYS:
        return list(a)
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi - _EPS_MS:
                out.append((lo, hi))
    return out


def _merge(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _clip(intervals, lo, hi):
    return [
        (max(a, lo), min(b, hi))
        for a, b in intervals
        if max(a, lo) < min(b, hi) - _EPS_MS
    ]


def _depth_spans(intervals, threshold):
    """Merged spans where at least `threshold` of the intervals overlap,
    plus the maximum depth sustained longer than the noise threshold."""
    events = []
    for lo, hi in intervals:
        events.append((lo, 1))
        events.append((hi, -1))
    events.sort()
    depth = best = 0
    spans = []
    prev = None
    for t, delta in events:
        if prev is not None and t - prev > _EPS_MS and depth > 0:
            best = max(best, depth)
            if depth >= threshold:
                spans.append((prev, t))
        depth += delta
        prev = t
    return _merge(spans), best


@dataclass
class EdgeReport:
    """Replay measurements for one edge over the middle cycle."""

    edge: object
    budget: int
    max_fully: int = 0
    fully_spans: list = field(default_factory=list)
    semi_count: int = 0
    semi_overlap_ms: float = 0.0
    semi_pair_violation: bool = False
    always_crossing: int = 0
    crossing_ms: float = 0.0
    self_overlap_ms: float = 0.0
    violation_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return (
            self.max_fully <= self.budget
            and not self.semi_pair_violation
            and self.self_overlap_ms <= 0
        )

    def to_json(self) -> dict:
        return {
            "edge": str(self.edge),
            "budget": self.budget,
            "max_fully": self.max_fully,
            "semi_count": self.semi_count,
            "semi_overlap_ms": round(self.semi_overlap_ms, 3),
            "semi_pair_violation": self.semi_pair_violation,
            "always_crossing": self.always_crossing,
            "crossing_ms": round(self.crossing_ms, 3),
            "self_overlap_ms": round(self.self_overlap_ms, 3),
            "violation_ms": round(self.violation_ms, 3),
            "ok": self.ok,
        }


@dataclass
class ValidationReport:
    ok: bool
    n: int
    edges: list[EdgeReport]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "n": self.n,
            "edges": [er.to_json() for er in self.edges],
        }


def _group_edge_reports(
    problem: ScheduleProblem,
    starts: dict[object, Sequence[int]],
    cycle: int,
    n: int,
    cycles: int = 3,
) -> list[EdgeReport]:
    """Replay one group for `cycles` cycles and measure the middle one.

    Any morph overlapping the window [cycle, 2*cycle) belongs to replica 0
    or 1; later replicas start past the window, so three replicas cover
    every interaction shape the infinite replay can produce.
    """
    profile = problem.profile
    layout = problem.layout

    def budget(e: object) -> int:
        return max(0, n - problem.always_crossing_count[e])

    if cycle <= 0:
        cycle = max(
            (max(ts) + problem.trip_ms(e) for e, ts in starts.items() if ts),
            default=0,
        )
    if cycle <= 0:
        return [EdgeReport(e, budget(e)) for e in starts]

    replayed = {
        e: [t + r * cycle for r in range(cycles) for t in ts]
        for e, ts in starts.items()
    }
    win_lo, win_hi = float(cycle), float(2 * cycle)

    # Cover sets per directed record, from raw float geometry.
    cover: dict[tuple, object] = {}
    for e, dps in problem.points.items():
        if e not in starts:
            continue
        for dp in dps:
            le = layout.edge_length(e)
            cover[(e, dp.point)] = _real_cover(
                profile, le, dp.distance, replayed.get(e, [])
            )

    reports = []
    for e in starts:
        rep = EdgeReport(e, budget(e))
        rep.always_crossing = problem.always_crossing_count[e]
        # An edge must finish one morph before starting the next; the
        # replayed list exposes cycle-boundary collisions too.
        le = layout.edge_length(e)
        morph_ms = 2000.0 * (profile.eta - profile.delta) * le / profile.speed
        morph_ms += profile.pause
        ts_sorted = sorted(replayed.get(e, []))
        for s1, s2 in zip(ts_sorted, ts_sorted[1:]):
            if s1 + morph_ms > s2 + _EPS_MS:
                rep.self_overlap_ms += s1 + morph_ms - s2
        rep.violation_ms += rep.self_overlap_ms
        fully: list[tuple[float, float]] = []
        semi: list[tuple[list, bool]] = []
        crossing: list[tuple[float, float]] = []
        for dp in problem.points[e]:
            own = cover.get((e, dp.point), [])
            opp = cover.get((dp.other, dp.point))
            if opp is None:
                opp = _real_cover(
                    profile,
                    layout.edge_length(dp.other),
                    dp.other_distance,
                    replayed.get(dp.other, []),
                )
            inter = _intersect_lists(own, opp)
            if inter == ALWAYS:
                continue  # always-crossing: flagged via the record count
            spans = _clip(_merge(inter), win_lo, win_hi)
            if not spans:
                continue
            crossing.extend(spans)
            if dp.point_class == FULLY_AVOIDABLE:
                fully.extend(spans)
            elif dp.point_class == SEMI_AVOIDABLE:
                semi.append((spans, dp.other_always))
        k = rep.budget
        spans, rep.max_fully = _depth_spans(fully, k + 1)
        rep.fully_spans = spans
        rep.violation_ms += sum(hi - lo for lo, hi in spans)
        rep.crossing_ms = sum(hi - lo for lo, hi in _merge(crossing))
        rep.semi_count = len(semi)
        if semi:
            overlap_total = 0.0
            for i in range(len(semi)):
                for j in range(i + 1, len(semi)):
                    spans_i, always_i = semi[i]
                    spans_j, always_j = semi[j]
                    both = _merge(_intersect_lists(spans_i, spans_j))
                    dur = sum(hi - lo for lo, hi in both)
                    if dur <= _EPS_MS:
                        continue
                    overlap_total += dur
                    # A pair whose opposite stubs both always pass cannot
                    # be separated by any schedule; only report it.
                    if k == 0 and not (always_i and always_j):
                        rep.semi_pair_violation = True
                        rep.violation_ms += dur
            rep.semi_overlap_ms = overlap_total
        reports.append(rep)
    return reports


def validate(
    layout: GraphLayout,
    profile: MorphProfile,
    schedule,
    n: int | None = None,
    cycles: int = 3,
    problem: ScheduleProblem | None = None,
) -> ValidationReport:
    """Check a schedule against the real-valued replay.

    schedule needs .starts plus either .groups (each with .starts and
    .t_cycle) or .t_cycle; n defaults to the schedule's allowance.
    """
    if problem is None:
        problem = ScheduleProblem(layout, profile)
    if n is None:
        n = getattr(schedule, "allowable_n", 0)
    groups = getattr(schedule, "groups", None)
    reports: list[EdgeReport] = []
    if groups:
        for gs in groups:
            reports.extend(
                _group_edge_reports(problem, gs.starts, gs.t_cycle, n, cycles)
            )
    else:
        reports.extend(
            _group_edge_reports(problem, schedule.starts, schedule.t_cycle, n, cycles)
        )
    return ValidationReport(all(r.ok for r in reports), n, reports)


def violation_duration_ms(
    layout: GraphLayout,
    profile: MorphProfile,
    starts: dict[object, Sequence[int]],
    cycle: int,
    n: int,
    problem: ScheduleProblem | None = None,
) -> int:
    """Total per-edge violating replay time for one group, rounded up."""
    if problem is None:
        problem = ScheduleProblem(layout, profile)
    reports = _group_edge_reports(problem, starts, cycle, n)
    return ceil(sum(r.violation_ms for r in reports))


# --- brute-force forbidden period oracle -----------------------------------


def _grid_cover(dp_pass: int, dp_ret: int, always: bool, reachable: bool, ts):
    if always:
        return ALWAYS
    if not reachable or not ts:
        return []
    return [(t + dp_pass, t + dp_ret) for t in ts]


def _hits(w_lo: int, w_hi: int, ivs) -> bool:
    """Closed [w_lo, w_hi] against half-open interval list (or ALWAYS)."""
    if ivs == ALWAYS:
        return True
    return any(w_hi >= a and w_lo < b for a, b in ivs)


def _pair_o(c1, c2):
    if c1 == ALWAYS and c2 == ALWAYS:
        return ALWAYS
    if c1 == ALWAYS:
        return list(c2)
    if c2 == ALWAYS:
        return list(c1)
    out = []
    for a1, b1 in c1:
        for a2, b2 in c2:
            lo, hi = max(a1, a2), min(b1, b2)
            if lo < hi:
                out.append((lo, hi))
    return out


def brute_force_forbidden(
    problem: ScheduleProblem,
    starts: dict[object, Sequence[int]],
    edge: object,
    t_range: tuple[int, int],
    level: str = "basic",
    cycle: int = 0,
    n: int = 0,
) -> set[int]:
    """Millisecond-by-millisecond forbidden start times, no interval algebra.

    Shares the grid timing inputs with the scheduler but re-decides every
    candidate start directly from window overlap tests, so structural bugs
    in the period construction cannot cancel out.
    """
    if level not in ("basic", "self", "duplication", "allowance"):
        raise ValueError(f"unknown level {level!r}")
    dps = problem.points[edge]
    trip = problem.trip_ms(edge)
    own_ts = list(starts.get(edge, ()))

    opp_cover = {}
    for dp in dps:
        opp_cover[dp.point] = _grid_cover(
            dp.other_pass_ms,
            dp.other_ret_ms,
            dp.other_always,
            dp.other_reachable,
            starts.get(dp.other, ()),
        )

    def basic_at(t: int) -> bool:
        return any(
            _hits(t + dp.pass_ms, t + dp.ret_ms, opp_cover[dp.point])
            for dp in dps
            if opp_cover[dp.point]
        )

    def self_at(t: int) -> bool:
        return any(s - trip <= t < s + trip for s in own_ts)

    def crit_at(t: int, k: int) -> bool:
        if k == 0:
            for dp in dps:
                c = opp_cover[dp.point]
                if c and c != ALWAYS and _hits(t + dp.pass_ms, t + dp.ret_ms, c):
                    return True
            semis = [dp for dp in dps if dp.point_class == SEMI_AVOIDABLE]
            for i in range(len(semis)):
                for j in range(i + 1, len(semis)):
                    o = _pair_o(opp_cover[semis[i].point], opp_cover[semis[j].point])
                    if o == ALWAYS or not o:
                        continue
                    if _hits(
                        t + semis[i].pass_ms, t + semis[i].ret_ms, o
                    ) and _hits(t + semis[j].pass_ms, t + semis[j].ret_ms, o):
                        return True
            return False
        cand = [
            dp
            for dp in dps
            if dp.point_class != ALWAYS_CROSSING and opp_cover[dp.point]
        ]
        if len(cand) <= k:
            return False
        # The simultaneity count only changes where some point's live run
        # begins, so those starts are the only instants worth testing.
        probes = set()
        for dp in cand:
            c = opp_cover[dp.point]
            w_lo, w_hi = t + dp.pass_ms, t + dp.ret_ms
            if c == ALWAYS:
                probes.add(w_lo)
            else:
                for a, b in c:
                    u = max(a, w_lo)
                    if u <= min(b - 1, w_hi):
                        probes.add(u)
        for u in probes:
            total = bounded = 0
            for dp in cand:
                if not t + dp.pass_ms <= u <= t + dp.ret_ms:
                    continue
                c = opp_cover[dp.point]
                if c == ALWAYS:
                    total += 1
                elif any(a <= u < b for a, b in c):
                    total += 1
                    bounded += 1
            if total >= k + 1 and bounded >= 1:
                return True
        return False

    def opst_tables() -> list[tuple[int, int, list[int]]]:
        """(pass, ret, sorted overload instants) per point this edge may skip."""
        all_ts = [t for ts in starts.values() for t in ts]
        if all_ts:
            u_lo = min(all_ts)
            u_hi = max(all_ts) + max(problem.trip_ms(e) for e in starts) + 1
        else:
            u_lo, u_hi = 0, 1
        tables = []
        for dp in dps:
            if dp.always:
                continue
            other = dp.other
            k2 = max(0, n - problem.always_crossing_count[other])
            view = problem.point_view[other]
            dp_at = view.get(dp.point)

            def own_of(dq) -> object:
                return _grid_cover(
                    dq.pass_ms, dq.ret_ms, dq.always, True, starts.get(other, ())
                )

            def opp_of(dq) -> object:
                return _grid_cover(
                    dq.other_pass_ms,
                    dq.other_ret_ms,
                    dq.other_always,
                    dq.other_reachable,
                    starts.get(dq.other, ()),
                )

            def member(u: int, ivs) -> bool:
                if ivs == ALWAYS:
                    return True
                return any(a <= u < b for a, b in ivs)

            sub: list[int] = []
            if k2 == 0 and (dp_at is None or not dp_at.always):
                ivs = [] if dp_at is None else own_of(dp_at)
                for a, b in ivs:
                    sub.extend(range(a, b))
            elif k2 == 0:
                xs = [
                    (own_of(dq), opp_of(dq))
                    for dq in problem.points[other]
                    if dq.point_class in (FULLY_AVOIDABLE, SEMI_AVOIDABLE)
                ]
                sub = [
                    u
                    for u in range(u_lo, u_hi)
                    if any(member(u, o1) and member(u, o2) for o1, o2 in xs)
                ]
            else:
                xs = [
                    (own_of(dq), opp_of(dq))
                    for dq in problem.points[other]
                    if dq.point_class != ALWAYS_CROSSING
                ]
                sub = [
                    u
                    for u in range(u_lo, u_hi)
                    if sum(member(u, o1) and member(u, o2) for o1, o2 in xs) >= k2
                ]
            if sub:
                tables.append((dp.pass_ms, dp.ret_ms, sub))
        return tables

    def make_level():
        if level == "basic":
            return basic_at
        if level == "self":
            return lambda t: basic_at(t) or self_at(t)
        if level == "duplication":

            def dup(t: int) -> bool:
                if basic_at(t) or self_at(t):
                    return True
                return cycle > 0 and (basic_at(t - cycle) or self_at(t - cycle))

            return dup
        k = max(0, n - problem.always_crossing_count[edge])
        tables = opst_tables()

        def opst_at(t: int) -> bool:
            for p_ms, r_ms, sub in tables:
                i = bisect_left(sub, t + p_ms)
                if i < len(sub) and sub[i] <= t + r_ms:
                    return True
            return False

        def allow_one(t: int) -> bool:
            return crit_at(t, k) or self_at(t) or opst_at(t)

        def allow(t: int) -> bool:
            if allow_one(t):
                return True
            return cycle > 0 and allow_one(t - cycle)

        return allow

    t_lo, t_hi = t_range
    fn = make_level()
    return {t for t in range(t_lo, t_hi) if fn(t)}
