"""Exact set algebra over unions of half-open [lo, hi) intervals.

TimePeriod is the value type behind every start-time computation in this
package: a canonical, immutable union of disjoint, non-adjacent intervals.
Endpoints live on an integer millisecond grid but may also be -inf/+inf so
that the universe and complements stay representable.  The same type doubles
as a container for real-valued (float endpoint) periods in the validator;
only the grid searches t_earliest/t_latest assume integer semantics.

Canonical form: intervals sorted ascending, pairwise disjoint, and never
adjacent (hi_i < lo_{i+1}), with lo < hi in each pair.  The empty set is the
empty tuple, the universe is ((-inf, +inf),).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INF = float("inf")
NEG_INF = float("-inf")

Endpoint = int | float
Interval = tuple[Endpoint, Endpoint]


class NoFeasibleTime(Exception):
    """Raised when a forbidden period leaves no legal start time."""


def _normalize(pairs: Iterable[Interval]) -> tuple[Interval, ...]:
    items = sorted((lo, hi) for lo, hi in pairs if lo < hi)
    out: list[list[Endpoint]] = []
    for lo, hi in items:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True)
class TimePeriod:
    """Canonical union of half-open intervals; build via from_intervals/of."""

    intervals: tuple[Interval, ...] = ()

    @staticmethod
    def of(lo: Endpoint, hi: Endpoint) -> "TimePeriod":
        return TimePeriod(_normalize([(lo, hi)]))

    @staticmethod
    def from_intervals(pairs: Iterable[Interval]) -> "TimePeriod":
        return TimePeriod(_normalize(pairs))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_universe(self) -> bool:
        return self.intervals == ((NEG_INF, INF),)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __contains__(self, t: Endpoint) -> bool:
        for lo, hi in self.intervals:
            if t < lo:
                return False
            if t < hi:
                return True
        return False

    def duration(self) -> Endpoint:
        """Total length; inf when any side is unbounded."""
        return sum(hi - lo for lo, hi in self.intervals) if self.intervals else 0

    def union(self, other: "TimePeriod") -> "TimePeriod":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        return TimePeriod(_normalize(self.intervals + other.intervals))

    def intersect(self, other: "TimePeriod") -> "TimePeriod":
        a, b = self.intervals, other.intervals
        i = j = 0
        out: list[Interval] = []
        while i < len(a) and j < len(b):
            lo = a[i][0] if a[i][0] > b[j][0] else b[j][0]
            hi = a[i][1] if a[i][1] < b[j][1] else b[j][1]
            if lo < hi:
                out.append((lo, hi))
            if a[i][1] <= b[j][1]:
                i += 1
            else:
                j += 1
        return TimePeriod(tuple(out))

    def complement(self) -> "TimePeriod":
        out: list[Interval] = []
        cursor: Endpoint = NEG_INF
        for lo, hi in self.intervals:
            if cursor < lo:
                out.append((cursor, lo))
            cursor = hi
        if cursor < INF:
            out.append((cursor, INF))
        return TimePeriod(tuple(out))

    def shift(self, delta: Endpoint) -> "TimePeriod":
        return TimePeriod(tuple((lo + delta, hi + delta) for lo, hi in self.intervals))

    def clip(self, lo: Endpoint, hi: Endpoint) -> "TimePeriod":
        return self.intersect(TimePeriod.of(lo, hi))

    def to_json(self) -> list[list]:
        def enc(x: Endpoint) -> object:
            if x == INF:
                return "+inf"
            if x == NEG_INF:
                return "-inf"
            return x

        return [[enc(lo), enc(hi)] for lo, hi in self.intervals]

    @staticmethod
    def from_json(obj: Sequence[Sequence]) -> "TimePeriod":
        def dec(x: object) -> Endpoint:
            if x == "+inf":
                return INF
            if x == "-inf":
                return NEG_INF
            if not isinstance(x, (int, float)):
                raise ValueError(f"bad endpoint: {x!r}")
            return x

        return TimePeriod.from_intervals((dec(lo), dec(hi)) for lo, hi in obj)


EMPTY = TimePeriod()
UNIVERSE = TimePeriod(((NEG_INF, INF),))


def union(*periods: TimePeriod) -> TimePeriod:
    """Union of any number of periods in one normalization pass."""
    parts: list[Interval] = []
    for p in periods:
        parts.extend(p.intervals)
    return TimePeriod(_normalize(parts))


def union_all(periods: Iterable[TimePeriod]) -> TimePeriod:
    return union(*periods)


def intersect(a: TimePeriod, b: TimePeriod) -> TimePeriod:
    return a.intersect(b)


def complement(p: TimePeriod) -> TimePeriod:
    return p.complement()


def t_earliest(p: TimePeriod) -> int:
    """Smallest integer t >= 0 outside p.

    Raises NoFeasibleTime when p covers all of [0, +inf).
    """
    t = 0
    for lo, hi in p.intervals:
        if hi <= t:
            continue
        if lo > t:
            break
        if hi == INF:
            raise NoFeasibleTime("no start time at or after 0")
        t = math.ceil(hi)
    return t


def t_latest(p: TimePeriod) -> int:
    """Largest integer t <= -1 outside p.

    Defined on the grid so the answer always exists unless p covers all of
    (-inf, 0); in that case NoFeasibleTime is raised.
    """
    t = -1
    for lo, hi in reversed(p.intervals):
        if lo > t:
            continue
        if hi <= t:
            break
        if lo == NEG_INF:
            raise NoFeasibleTime("no start time before 0")
        t = math.ceil(lo) - 1
    return t


def shift_window(p: TimePeriod, pass_ms: Endpoint, ret_ms: Endpoint) -> TimePeriod:
    """Map each [a, b) to [a - ret_ms, b - pass_ms).

    This is the start-time preimage of "the stub covers its crossing point
    while p is active", where the stub covers the point from pass_ms to
    ret_ms after the morph start.  The left endpoint is kept closed, which
    is 1 ms conservative versus a strict overlap test; membership satisfies
    t in result  iff  [t + pass_ms, t + ret_ms] (closed) meets p.
    """
    if not 0 <= pass_ms <= ret_ms:
        raise ValueError("need 0 <= pass_ms <= ret_ms")
    return TimePeriod(_normalize((lo - ret_ms, hi - pass_ms) for lo, hi in p.intervals))


def widen_cycle(cycle: Endpoint, p: TimePeriod) -> TimePeriod:
    """p together with its copy shifted cycle ms later (two-cycle horizon)."""
    if cycle < 0:
        raise ValueError("cycle must be >= 0")
    if cycle == 0 or p.is_empty:
        return p
    return TimePeriod(
        _normalize(p.intervals + tuple((lo + cycle, hi + cycle) for lo, hi in p.intervals))
    )


def depth_at_least(periods: Sequence[TimePeriod], k: int) -> TimePeriod:
    """Times covered by at least k of the given periods.

    Equivalent to the union of intersections over all k-subsets, evaluated
    with a single endpoint sweep instead of subset enumeration.
    """
    if k <= 0:
        return UNIVERSE
    if k > len(periods):
        return EMPTY
    deltas: dict[Endpoint, int] = {}
    for p in periods:
        for lo, hi in p.intervals:
            deltas[lo] = deltas.get(lo, 0) + 1
            deltas[hi] = deltas.get(hi, 0) - 1
    depth = 0
    start: Endpoint | None = None
    out: list[Interval] = []
    for pos in sorted(deltas):
        nxt = depth + deltas[pos]
        if depth < k <= nxt:
            start = pos
        elif nxt < k <= depth:
            out.append((start, pos))  # type: ignore[arg-type]
        depth = nxt
    return TimePeriod(_normalize(out))
