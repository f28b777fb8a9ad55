"""Interval-set algebra: pinned examples plus per-millisecond law checks."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference
from medsched.timeline import (
    EMPTY,
    INF,
    NEG_INF,
    UNIVERSE,
    NoFeasibleTime,
    TimePeriod,
    complement,
    depth_at_least,
    intersect,
    shift_window,
    t_earliest,
    t_latest,
    union,
    union_all,
    widen_cycle,
)

WLO, WHI = -80, 80


def per(*pairs) -> TimePeriod:
    return TimePeriod.from_intervals(pairs)


# --- strategies -------------------------------------------------------------

finite_periods = st.lists(
    st.tuples(st.integers(-60, 60), st.integers(-60, 60)), max_size=6
).map(TimePeriod.from_intervals)

endpoints = st.one_of(st.integers(-60, 60), st.sampled_from([NEG_INF, INF]))
periods = st.lists(st.tuples(endpoints, endpoints), max_size=6).map(
    TimePeriod.from_intervals
)


def assert_canonical(p: TimePeriod) -> None:
    for lo, hi in p.intervals:
        assert lo < hi
    for (_, hi1), (lo2, _) in zip(p.intervals, p.intervals[1:]):
        assert hi1 < lo2


# --- pinned examples --------------------------------------------------------


def test_union_examples():
    assert per((0, 10)).union(per((5, 20))) == per((0, 20))
    assert EMPTY.union(per((3, 7))) == per((3, 7))
    assert per((0, 5)).union(per((5, 9))) == per((0, 9))


def test_intersect_examples():
    assert intersect(per((0, 10)), per((5, 20))) == per((5, 10))
    assert intersect(per((0, 5)), per((5, 9))) == EMPTY
    assert intersect(UNIVERSE, per((2, 4))) == per((2, 4))


def test_complement_examples():
    assert complement(per((0, 10))) == per((NEG_INF, 0), (10, INF))
    assert complement(EMPTY) == UNIVERSE
    p = per((-3, 4), (9, 12))
    assert complement(complement(p)) == p


def test_t_earliest_examples():
    assert t_earliest(EMPTY) == 0
    assert t_earliest(per((0, 10))) == 10
    assert t_earliest(per((-5, 3), (7, 9))) == 3
    with pytest.raises(NoFeasibleTime):
        t_earliest(UNIVERSE)
    with pytest.raises(NoFeasibleTime):
        t_earliest(per((-5, INF)))


def test_t_latest_examples():
    assert t_latest(EMPTY) == -1
    assert t_latest(per((-5, 3))) == -6
    assert t_latest(per((-3, -1))) == -1
    with pytest.raises(NoFeasibleTime):
        t_latest(UNIVERSE)
    with pytest.raises(NoFeasibleTime):
        t_latest(per((NEG_INF, 3)))
    assert t_latest(per((NEG_INF, -2))) == -1


def test_shift_window_examples():
    assert shift_window(per((500, 600)), 500, 600) == per((-100, 100))
    assert shift_window(EMPTY, 5, 9) == EMPTY
    assert shift_window(UNIVERSE, 5, 9) == UNIVERSE
    with pytest.raises(ValueError):
        shift_window(per((0, 5)), 9, 5)


def test_widen_cycle_examples():
    assert widen_cycle(1200, per((-1100, 1100))) == per((-1100, 2300))
    p = per((-3, 4), (9, 12))
    assert widen_cycle(0, p) == p
    assert widen_cycle(5000, per((0, 10))) == per((0, 10), (5000, 5010))
    with pytest.raises(ValueError):
        widen_cycle(-1, p)


def test_depth_at_least_examples():
    ps = [per((0, 10)), per((5, 15)), per((8, 20))]
    assert depth_at_least(ps, 2) == per((5, 15))
    assert depth_at_least(ps, 1) == union_all(ps)
    assert depth_at_least([per((0, 5)), per((10, 15))], 2) == EMPTY
    assert depth_at_least(ps, 0) == UNIVERSE
    assert depth_at_least(ps, 4) == EMPTY


def test_union_variadic():
    assert union() == EMPTY
    assert union(per((0, 2)), per((4, 6)), per((1, 5))) == per((0, 6))


def test_contains_and_duration():
    p = per((0, 5), (8, 10))
    assert 0 in p and 4 in p and 5 not in p and 8 in p and 10 not in p
    assert p.duration() == 7
    assert UNIVERSE.duration() == INF
    assert EMPTY.duration() == 0


def test_json_round_trip():
    p = per((NEG_INF, -3), (0, 5), (9, INF))
    assert p.to_json() == [["-inf", -3], [0, 5], [9, "+inf"]]
    assert TimePeriod.from_json(p.to_json()) == p
    assert TimePeriod.from_json([]) == EMPTY
    with pytest.raises(ValueError):
        TimePeriod.from_json([["x", 3]])


def test_constructors_normalize():
    assert TimePeriod.of(5, 5) == EMPTY
    assert TimePeriod.of(7, 3) == EMPTY
    assert per((0, 2), (2, 4), (1, 3)) == per((0, 4))
    assert per((NEG_INF, 0), (0, INF)) == UNIVERSE


# --- law checks against per-ms oracles --------------------------------------


@given(periods, periods)
def test_union_members(p, q):
    r = p.union(q)
    assert_canonical(r)
    assert reference.members(r, WLO, WHI) == reference.members(p, WLO, WHI) | (
        reference.members(q, WLO, WHI)
    )


@given(periods, periods)
def test_intersect_members(p, q):
    r = p.intersect(q)
    assert_canonical(r)
    assert reference.members(r, WLO, WHI) == reference.members(p, WLO, WHI) & (
        reference.members(q, WLO, WHI)
    )


@given(periods)
def test_complement_members(p):
    r = p.complement()
    assert_canonical(r)
    window = set(range(WLO, WHI))
    assert reference.members(r, WLO, WHI) == window - reference.members(p, WLO, WHI)
    assert r.complement() == p


@given(periods, periods)
def test_de_morgan(p, q):
    assert complement(p.union(q)) == complement(p).intersect(complement(q))
    assert complement(p.intersect(q)) == complement(p).union(complement(q))


@given(finite_periods, finite_periods, st.integers(0, 10), st.integers(0, 10))
def test_shift_window_distributes_over_union(p, q, pass_ms, extra):
    ret_ms = pass_ms + extra
    assert shift_window(p.union(q), pass_ms, ret_ms) == shift_window(
        p, pass_ms, ret_ms
    ).union(shift_window(q, pass_ms, ret_ms))


@given(finite_periods, st.integers(0, 10), st.integers(0, 10))
def test_shift_window_membership_semantics(p, pass_ms, extra):
    """A start is shifted-in iff its closed probe window meets the period."""
    ret_ms = pass_ms + extra
    r = shift_window(p, pass_ms, ret_ms)
    assert_canonical(r)
    pset = reference.members(p, WLO - 30, WHI + 30)
    assert reference.members(r, WLO, WHI) == reference.shift_window_members(
        pset, pass_ms, ret_ms, WLO, WHI
    )


@given(finite_periods, st.integers(0, 40))
def test_widen_cycle_members(p, cycle):
    r = widen_cycle(cycle, p)
    assert reference.members(r, WLO, WHI + 110) == reference.widen_members(
        reference.members(p, WLO, WHI + 70), cycle
    ) & set(range(WLO, WHI + 110))


@given(st.lists(finite_periods, max_size=8), st.integers(1, 4))
def test_depth_at_least_members_and_subsets(ps, k):
    r = depth_at_least(ps, k)
    assert_canonical(r)
    sets = [reference.members(p, WLO, WHI) for p in ps]
    assert reference.members(r, WLO, WHI) == reference.depth_members(
        sets, k, WLO, WHI
    )
    assert r == reference.naive_depth_at_least(ps, k)


@given(finite_periods)
def test_t_earliest_is_minimal(p):
    t = t_earliest(p)
    assert t >= 0 and t not in p
    assert reference.earliest_member_outside(reference.members(p, 0, 200)) == t


@given(finite_periods)
def test_t_latest_is_maximal(p):
    t = t_latest(p)
    assert t <= -1 and t not in p
    assert reference.latest_member_outside(reference.members(p, -200, 0)) == t


@given(periods)
def test_json_round_trip_random(p):
    assert TimePeriod.from_json(p.to_json()) == p
