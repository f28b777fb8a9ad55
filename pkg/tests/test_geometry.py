"""Layouts, crossing records, classification, and stub kinematics."""

from __future__ import annotations

import math

import pytest

import reference
from conftest import CROSS_PROFILE, circle_problem, make_cross_layout
from medsched import timeline
from medsched.geometry import (
    ALWAYS_CROSSING,
    ALWAYS_PASSING,
    AVOIDABLE,
    FULLY_AVOIDABLE,
    SEMI_AVOIDABLE,
    GraphLayout,
    LayoutError,
    MorphProfile,
    ScheduleProblem,
    classify_intersections,
    compute_intersections,
    generate_circle_layout,
    morphing_groups,
    pass_period,
    point_key,
    stub_motions,
)

DELTAS = (0.04, 0.09, 0.16, 0.25)


def layout_of(nodes, edges) -> GraphLayout:
    return GraphLayout.from_json(
        {
            "nodes": [{"id": i, "x": x, "y": y} for i, (x, y) in nodes.items()],
            "edges": [{"id": eid, "a": a, "b": b} for eid, (a, b) in edges.items()],
        }
    )


# --- layouts ----------------------------------------------------------------


def test_circle_layout_k4():
    lay = generate_circle_layout(4, 200.0)
    got = [(n.x, n.y) for n in lay.nodes]
    want = [(200, 0), (0, 200), (-200, 0), (0, -200)]
    for (gx, gy), (wx, wy) in zip(got, want):
        assert math.isclose(gx, wx, abs_tol=1e-9)
        assert math.isclose(gy, wy, abs_tol=1e-9)
    assert len(lay.edges) == 6


def test_circle_layout_edge_counts():
    assert len(generate_circle_layout(7).edges) == 21
    assert len(generate_circle_layout(13).edges) == 78


def test_circle_layout_rejects_bad_input():
    with pytest.raises(ValueError):
        generate_circle_layout(2)
    with pytest.raises(ValueError):
        generate_circle_layout(5, 0.0)


def test_layout_validation_errors():
    with pytest.raises(LayoutError):  # duplicate node id
        GraphLayout.from_json(
            {"nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 0, "x": 1, "y": 1}], "edges": []}
        )
    with pytest.raises(LayoutError):  # coincident nodes
        layout_of({0: (0, 0), 1: (0, 0)}, {})
    with pytest.raises(LayoutError):  # self loop
        layout_of({0: (0, 0), 1: (1, 0)}, {"e": (0, 0)})
    with pytest.raises(LayoutError):  # missing endpoint
        layout_of({0: (0, 0), 1: (1, 0)}, {"e": (0, 2)})
    with pytest.raises(LayoutError):  # duplicate edge
        layout_of({0: (0, 0), 1: (1, 0)}, {"e": (0, 1), "f": (1, 0)})
    with pytest.raises(LayoutError):  # node inside a foreign edge
        layout_of({0: (0, 0), 1: (4, 0), 2: (2, 0), 3: (2, 5)}, {"e": (0, 1), "f": (2, 3)})
    with pytest.raises(LayoutError):  # malformed json
        GraphLayout.from_json({"nodes": [{"id": 0}], "edges": []})


def test_layout_json_round_trip(tmp_path):
    lay = make_cross_layout()
    path = tmp_path / "lay.json"
    lay.save(str(path))
    again = GraphLayout.load(str(path))
    assert again.to_json() == lay.to_json()


# --- crossing records -------------------------------------------------------


def test_cross_records():
    recs = compute_intersections(make_cross_layout())
    assert len(recs) == 2
    assert {r.edge for r in recs} == {"h", "v"}
    for r in recs:
        assert math.isclose(r.s, 0.5, abs_tol=1e-12)
        assert math.isclose(r.d, 100.0, abs_tol=1e-9)
        assert r.point == point_key("h", "v")


def test_k4_circle_single_crossing():
    recs = compute_intersections(generate_circle_layout(4))
    assert len(recs) == 2
    assert {r.edge for r in recs} == {"0-2", "1-3"}
    for r in recs:
        assert math.isclose(r.d, 200.0, abs_tol=1e-9)


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9, 13])
def test_circle_crossing_counts(n):
    recs = compute_intersections(generate_circle_layout(n))
    assert len(recs) == 2 * math.comb(n, 4)
    assert reference.crossing_count(n) == math.comb(n, 4)


def test_no_crossing_cases():
    parallel = layout_of(
        {0: (0, 0), 1: (10, 0), 2: (0, 5), 3: (10, 5)}, {"e": (0, 1), "f": (2, 3)}
    )
    assert compute_intersections(parallel) == []
    shared = layout_of(
        {0: (0, 0), 1: (10, 0), 2: (5, 5)}, {"e": (0, 1), "f": (0, 2)}
    )
    assert compute_intersections(shared) == []
    collinear = layout_of(
        {0: (0, 0), 1: (1, 0), 2: (2, 0), 3: (3, 0)}, {"e": (0, 1), "f": (2, 3)}
    )
    assert compute_intersections(collinear) == []


def test_record_pairing_bijection():
    recs = compute_intersections(generate_circle_layout(8))
    index = {(r.edge, r.opposite, r.point) for r in recs}
    assert len(recs) % 2 == 0
    for r in recs:
        assert (r.opposite, r.edge, r.point) in index


# --- classification ---------------------------------------------------------


def test_cross_classification_fully_avoidable(cross_problem):
    for rec in cross_problem.records:
        assert rec.kind == AVOIDABLE
        assert rec.point_class == FULLY_AVOIDABLE


def test_k8_diameter_semi_avoidable():
    problem = circle_problem(8, 0.25)
    by_pair = {(r.edge, r.opposite): r for r in problem.records}
    diam = by_pair[("0-4", "1-7")]
    assert math.isclose(diam.d, 200 - 200 * math.cos(math.pi / 4), abs_tol=1e-9)
    assert diam.kind == ALWAYS_PASSING
    assert diam.point_class == SEMI_AVOIDABLE
    twin = by_pair[("1-7", "0-4")]
    assert twin.kind == AVOIDABLE
    assert twin.point_class == SEMI_AVOIDABLE


def test_k13_quarter_delta_has_always_crossing():
    problem = circle_problem(13, 0.25)
    assert any(r.point_class == ALWAYS_CROSSING for r in problem.records)


def grid_presence(n: int, delta: float):
    problem = circle_problem(n, delta)
    has_ap = any(r.kind == ALWAYS_PASSING for r in problem.records)
    has_ac = any(r.point_class == ALWAYS_CROSSING for r in problem.records)
    return has_ap, has_ac


def expected_presence(n: int, delta: float):
    has_ap = (
        (delta == 0.25 and n == 7)
        or (delta in (0.16, 0.25) and n in (8, 9, 10))
        or (delta in (0.09, 0.16, 0.25) and n in (11, 12, 13))
    )
    has_ac = delta == 0.25 and n in (10, 11, 12, 13)
    return has_ap, has_ac


@pytest.mark.parametrize("n", range(7, 14))
@pytest.mark.parametrize("delta", DELTAS)
def test_classification_grid(n, delta):
    assert grid_presence(n, delta) == expected_presence(n, delta)
    assert reference.circle_class_presence(n, delta) == expected_presence(n, delta)


@pytest.mark.parametrize("n,delta", [(8, 0.16), (13, 0.25)])
def test_per_record_kinds_match_reference(n, delta):
    problem = circle_problem(n, delta)
    want = reference.circle_kinds(n, delta)
    got = {
        (r.edge, r.opposite): r.kind == ALWAYS_PASSING for r in problem.records
    }
    assert got == want


def test_classify_requires_run_before_motions():
    lay = make_cross_layout()
    with pytest.raises(ValueError):
        stub_motions(lay, CROSS_PROFILE, compute_intersections(lay))


def test_morph_profile_validation():
    with pytest.raises(ValueError):
        MorphProfile(0.5, 0.25)
    with pytest.raises(ValueError):
        MorphProfile(0.1, 0.6)
    with pytest.raises(ValueError):
        MorphProfile(0.1, 0.5, speed=0)
    with pytest.raises(ValueError):
        MorphProfile(0.1, 0.5, pause=-1)


# --- kinematics -------------------------------------------------------------


def test_cross_kinematics(cross_problem):
    motion = cross_problem.motions["h"]
    assert motion.trip_ms == 1100
    timing = motion.points[point_key("h", "v")]
    assert (timing.pass_ms, timing.ret_ms) == (500, 600)
    assert not timing.always


def test_k4_diameter_boundary_kinematics():
    problem = circle_problem(4, 0.25)
    motion = problem.motions["0-2"]
    assert motion.trip_ms == 2100
    timing = motion.points[point_key("0-2", "1-3")]
    assert (timing.pass_ms, timing.ret_ms) == (1000, 1100)


def test_rest_length_boundary_is_always_passing():
    # Vertical edge shifted so the crossing sits exactly delta*L from one end.
    lay = layout_of(
        {0: (-100, 0), 1: (100, 0), 2: (-50, -100), 3: (-50, 100)},
        {"h": (0, 1), "v": (2, 3)},
    )
    problem = ScheduleProblem(lay, CROSS_PROFILE)
    rec = next(r for r in problem.records if r.edge == "h")
    assert math.isclose(rec.d, 50.0, abs_tol=1e-9)
    assert rec.kind == ALWAYS_PASSING
    assert rec.point_class == SEMI_AVOIDABLE
    timing = problem.motions["h"].points[rec.point]
    assert (timing.pass_ms, timing.ret_ms) == (0, problem.trip_ms("h"))
    assert timing.always


def test_kinematics_monotone_in_distance():
    problem = circle_problem(8, 0.09)
    for eid, motion in problem.motions.items():
        recs = sorted(
            (r for r in problem.records if r.edge == eid and r.kind == AVOIDABLE),
            key=lambda r: r.d,
        )
        timings = [motion.points[r.point] for r in recs]
        for t1, t2 in zip(timings, timings[1:]):
            assert t1.pass_ms <= t2.pass_ms
            assert t1.ret_ms >= t2.ret_ms
        length = problem.layout.edge_length(eid)
        for r, t in zip(recs, timings):
            assert t.ret_ms == motion.trip_ms - t.pass_ms
            want = 1000.0 * (r.d - problem.profile.delta * length) / problem.profile.speed
            assert abs(t.pass_ms - want) <= 1


def test_pass_period_cases(cross_problem):
    motion = cross_problem.motions["h"]
    key = point_key("h", "v")
    assert pass_period(motion, key, 0) == timeline.TimePeriod.of(500, 600)
    assert pass_period(motion, key, None) == timeline.EMPTY

    short = MorphProfile(0.04, 0.2, 100.0, 100)
    problem = ScheduleProblem(make_cross_layout(), short)
    rec = next(r for r in problem.records if r.edge == "h")
    assert not rec.reachable  # d=100 beyond eta*L=40
    assert pass_period(problem.motions["h"], rec.point, 0) == timeline.EMPTY
    assert problem.points["h"] == ()  # unreachable points carry no constraint


def test_always_passing_pass_period_is_universe():
    problem = circle_problem(8, 0.25)
    rec = next(r for r in problem.records if r.kind == ALWAYS_PASSING)
    assert pass_period(problem.motions[rec.edge], rec.point, None) == timeline.UNIVERSE


# --- groups and problem assembly --------------------------------------------


def test_k4_groups():
    lay = generate_circle_layout(4)
    groups = morphing_groups(lay, compute_intersections(lay))
    assert sorted(map(len, groups)) == [1, 1, 1, 1, 2]
    assert ["0-2", "1-3"] in groups


def test_k7_groups_sides_are_singletons():
    lay = generate_circle_layout(7)
    groups = morphing_groups(lay, compute_intersections(lay))
    sides = {f"{i}-{i + 1}" for i in range(6)} | {"0-6"}
    singles = {g[0] for g in groups if len(g) == 1}
    assert singles == sides
    assert sorted(map(len, groups)) == [1] * 7 + [14]


def test_edgeless_graph_has_no_groups():
    lay = layout_of({0: (0, 0), 1: (5, 5)}, {})
    assert morphing_groups(lay, []) == []


def test_schedule_problem_views(cross_problem):
    assert cross_problem.trip_ms("h") == 1100
    assert set(cross_problem.edge_ids()) == {"h", "v"}
    assert cross_problem.always_crossing_count == {"h": 0, "v": 0}
    (dp,) = cross_problem.points["h"]
    assert dp.other == "v"
    assert (dp.pass_ms, dp.ret_ms) == (500, 600)
    assert (dp.other_pass_ms, dp.other_ret_ms) == (500, 600)
    assert dp.distance == pytest.approx(100.0)


def test_always_crossing_counts_positive_somewhere():
    problem = circle_problem(10, 0.25)
    assert any(v > 0 for v in problem.always_crossing_count.values())
    per_edge = {}
    for rec in problem.records:
        if rec.point_class == ALWAYS_CROSSING:
            per_edge[rec.edge] = per_edge.get(rec.edge, 0) + 1
    assert problem.always_crossing_count == {
        e: per_edge.get(e, 0) for e in problem.always_crossing_count
    }
