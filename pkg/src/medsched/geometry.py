"""Straight-line layouts, edge-crossing classification, and stub kinematics.

A drawn edge is shown as two stubs growing from its endpoints.  At rest each
stub covers a fraction delta of the edge; during one morph both stubs stretch
to eta, pause, and shrink back.  A crossing point between two edges is
reached by the nearer stub of each edge, so everything a scheduler needs per
edge is the distance d from that point to the nearer endpoint.

An intersection is identified with the pair of edges that cross.  If several
pairs happen to meet at the same coordinates each pair still counts as its
own intersection point, which keeps the crossing count of a convex complete
graph at C(n, 4) even when diameters are concurrent.  Every geometric
crossing yields two directed records, one per incident edge.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

EdgeId = object
PointKey = tuple

# Per-edge kind of a crossing point.
ALWAYS_PASSING = "always-passing"
AVOIDABLE = "avoidable"

# Class of the point, combining both incident edges.
FULLY_AVOIDABLE = "fully-avoidable"
SEMI_AVOIDABLE = "semi-avoidable"
ALWAYS_CROSSING = "always-crossing"


class LayoutError(ValueError):
    """Input drawing violates the general-position requirements."""


@dataclass(frozen=True)
class Node:
    id: object
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    id: object
    a: object
    b: object


@dataclass
class GraphLayout:
    """A validated straight-line drawing of a simple undirected graph."""

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        self._pos = {n.id: (n.x, n.y) for n in self.nodes}
        self._by_id = {e.id: e for e in self.edges}
        _validate(self)

    def position(self, node_id: object) -> tuple[float, float]:
        return self._pos[node_id]

    def edge(self, edge_id: object) -> Edge:
        return self._by_id[edge_id]

    def segment(self, edge_id: object) -> tuple[tuple[float, float], tuple[float, float]]:
        e = self._by_id[edge_id]
        return self._pos[e.a], self._pos[e.b]

    def edge_length(self, edge_id: object) -> float:
        (ax, ay), (bx, by) = self.segment(edge_id)
        return math.hypot(bx - ax, by - ay)

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": n.id, "x": n.x, "y": n.y} for n in self.nodes],
            "edges": [{"id": e.id, "a": e.a, "b": e.b} for e in self.edges],
        }

    @staticmethod
    def from_json(obj: Mapping) -> "GraphLayout":
        try:
            nodes = tuple(Node(n["id"], float(n["x"]), float(n["y"])) for n in obj["nodes"])
            edges = tuple(Edge(e["id"], e["a"], e["b"]) for e in obj["edges"])
        except (KeyError, TypeError) as exc:
            raise LayoutError(f"malformed layout object: {exc}") from exc
        return GraphLayout(nodes, edges)

    @staticmethod
    def load(path: str) -> "GraphLayout":
        with open(path, encoding="utf-8") as fh:
            return GraphLayout.from_json(json.load(fh))

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def _orient(a: tuple, b: tuple, c: tuple) -> int:
    """Exact sign of the cross product (b-a) x (c-a) for float inputs."""
    d = (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
        Fraction(b[1]) - Fraction(a[1])
    ) * (Fraction(c[0]) - Fraction(a[0]))
    return (d > 0) - (d < 0)


def _in_box(p: tuple, a: tuple, b: tuple) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(
        a[1], b[1]
    )


def _validate(layout: GraphLayout) -> None:
    ids = [n.id for n in layout.nodes]
    if len(set(ids)) != len(ids):
        raise LayoutError("duplicate node ids")
    seen_pos: dict[tuple[float, float], object] = {}
    for n in layout.nodes:
        if (n.x, n.y) in seen_pos:
            raise LayoutError(f"nodes {seen_pos[(n.x, n.y)]} and {n.id} coincide")
        seen_pos[(n.x, n.y)] = n.id
    eids = [e.id for e in layout.edges]
    if len(set(eids)) != len(eids):
        raise LayoutError("duplicate edge ids")
    pairs = set()
    for e in layout.edges:
        if e.a == e.b:
            raise LayoutError(f"edge {e.id} is a self-loop")
        if e.a not in layout._pos or e.b not in layout._pos:
            raise LayoutError(f"edge {e.id} references a missing node")
        key = frozenset((e.a, e.b))
        if key in pairs:
            raise LayoutError(f"duplicate edge between {e.a} and {e.b}")
        pairs.add(key)
    # No node may sit in the interior of an edge it does not belong to.
    for e in layout.edges:
        a, b = layout.segment(e.id)
        for n in layout.nodes:
            if n.id in (e.a, e.b):
                continue
            p = (n.x, n.y)
            if _orient(a, b, p) == 0 and _in_box(p, a, b):
                raise LayoutError(f"node {n.id} lies on edge {e.id}")


def generate_circle_layout(n: int, radius: float = 200.0) -> GraphLayout:
    """Complete graph K_n with node i at angle 2*pi*i/n on a circle."""
    if n < 3:
        raise ValueError("need at least 3 nodes")
    if radius <= 0:
        raise ValueError("radius must be positive")
    nodes = tuple(
        Node(i, radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
        for i in range(n)
    )
    edges = tuple(Edge(f"{i}-{j}", i, j) for i in range(n) for j in range(i + 1, n))
    return GraphLayout(nodes, edges)


@dataclass(frozen=True)
class MorphProfile:
    """Stub motion parameters: rest/extended ratios, speed, and hold pause."""

    delta: float
    eta: float = 0.5
    speed: float = 100.0  # px per second
    pause: int = 100  # ms at full extension

    def __post_init__(self) -> None:
        if not 0 <= self.delta < self.eta <= 0.5:
            raise ValueError("need 0 <= delta < eta <= 1/2")
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if self.pause < 0:
            raise ValueError("pause must be >= 0")


def point_key(e1: object, e2: object) -> PointKey:
    return tuple(sorted((e1, e2), key=str))


@dataclass(frozen=True)
class IntersectionRecord:
    """One edge's view of one crossing point.

    s is the position parameter along the edge (from endpoint a), d the
    distance from the nearer endpoint, so d = min(s, 1-s) * length.  kind and
    point_class are filled in by classify_intersections; reachable says
    whether the stub ever extends far enough (d <= eta * length).
    """

    edge: object
    opposite: object
    s: float
    d: float
    kind: str | None = None
    point_class: str | None = None
    reachable: bool = True

    @property
    def point(self) -> PointKey:
        return point_key(self.edge, self.opposite)


def compute_intersections(layout: GraphLayout) -> list[IntersectionRecord]:
    """Directed records for every proper interior crossing of two edges.

    Edges sharing an endpoint never count.  Orientation tests are exact on
    the input coordinates; only the position parameter s is computed in
    floating point.
    """
    out: list[IntersectionRecord] = []
    edges = layout.edges
    for i in range(len(edges)):
        e1 = edges[i]
        p1, p2 = layout.segment(e1.id)
        for j in range(i + 1, len(edges)):
            e2 = edges[j]
            if {e1.a, e1.b} & {e2.a, e2.b}:
                continue
            p3, p4 = layout.segment(e2.id)
            o1 = _orient(p1, p2, p3)
            o2 = _orient(p1, p2, p4)
            if o1 == o2 == 0:
                # Collinear edges: any actual overlap would have tripped the
                # node-on-edge validation, so these are disjoint.
                continue
            if o1 * o2 >= 0:
                continue
            o3 = _orient(p3, p4, p1)
            o4 = _orient(p3, p4, p2)
            if o3 * o4 >= 0:
                continue
            rx, ry = p2[0] - p1[0], p2[1] - p1[1]
            sx, sy = p4[0] - p3[0], p4[1] - p3[1]
            denom = rx * sy - ry * sx
            qx, qy = p3[0] - p1[0], p3[1] - p1[1]
            s1 = (qx * sy - qy * sx) / denom
            s2 = (qx * ry - qy * rx) / denom
            l1 = math.hypot(rx, ry)
            l2 = math.hypot(sx, sy)
            out.append(
                IntersectionRecord(e1.id, e2.id, s1, min(s1, 1.0 - s1) * l1)
            )
            out.append(
                IntersectionRecord(e2.id, e1.id, s2, min(s2, 1.0 - s2) * l2)
            )
    return out


def classify_intersections(
    records: Sequence[IntersectionRecord], layout: GraphLayout, profile: MorphProfile
) -> list[IntersectionRecord]:
    """Fill in per-edge kind, point class, and reachability.

    A stub whose rest length delta*L already reaches the point (d <= delta*L,
    boundary included) passes it always.  The point class pairs the two
    directed kinds: both always -> always-crossing, one -> semi-avoidable,
    none -> fully-avoidable.
    """
    kinds: dict[tuple, str] = {}
    halves: list[IntersectionRecord] = []
    for rec in records:
        length = layout.edge_length(rec.edge)
        kind = ALWAYS_PASSING if rec.d <= profile.delta * length else AVOIDABLE
        kinds[(rec.edge, rec.point)] = kind
        halves.append(replace(rec, kind=kind, reachable=rec.d <= profile.eta * length))
    out = []
    for rec in halves:
        other = kinds[(rec.opposite, rec.point)]
        if rec.kind == ALWAYS_PASSING and other == ALWAYS_PASSING:
            cls = ALWAYS_CROSSING
        elif rec.kind == ALWAYS_PASSING or other == ALWAYS_PASSING:
            cls = SEMI_AVOIDABLE
        else:
            cls = FULLY_AVOIDABLE
        out.append(replace(rec, point_class=cls))
    return out


_MS_EPS = 1e-6


def _floor_ms(x: float) -> int:
    # Absorbs float noise so analytically exact values land on the grid.
    return math.floor(x + _MS_EPS)


def _ceil_ms(x: float) -> int:
    return math.ceil(x - _MS_EPS)


@dataclass(frozen=True)
class PointTiming:
    """Grid-rounded stub timing of one edge at one crossing point."""

    pass_ms: int  # time after morph start when the stub first covers the point
    ret_ms: int  # time after morph start when it no longer does
    always: bool
    reachable: bool


@dataclass(frozen=True)
class StubMotion:
    """Morph duration of one edge plus its timing at every crossing point."""

    edge: object
    trip_ms: int
    points: Mapping[PointKey, PointTiming]


def stub_motions(
    layout: GraphLayout, profile: MorphProfile, records: Sequence[IntersectionRecord]
) -> dict[object, StubMotion]:
    """Grid kinematics for every edge.

    The one-way growth takes (eta - delta) * L / speed, so a round trip is
    twice that plus the pause.  Rounding is conservative: pass_ms rounds
    down and ret_ms = trip_ms - pass_ms rounds up, so the grid-level passing
    window contains the continuous-time one.
    """
    out: dict[object, StubMotion] = {}
    for e in layout.edges:
        length = layout.edge_length(e.id)
        trip = _ceil_ms(2000.0 * (profile.eta - profile.delta) * length / profile.speed)
        trip += profile.pause
        pts: dict[PointKey, PointTiming] = {}
        for rec in records:
            if rec.edge != e.id:
                continue
            if rec.kind is None:
                raise ValueError("records must be classified first")
            if rec.kind == ALWAYS_PASSING:
                pts[rec.point] = PointTiming(0, trip, True, True)
            else:
                pass_ms = max(0, _floor_ms(1000.0 * (rec.d - profile.delta * length) / profile.speed))
                pts[rec.point] = PointTiming(pass_ms, trip - pass_ms, False, rec.reachable)
        out[e.id] = StubMotion(e.id, trip, pts)
    return out


def pass_period(motion: StubMotion, point: PointKey, t_start: int | None):
    """Times the edge's stub covers the point, for one morph started at t_start.

    Universe if the stub always covers it, empty while no start is scheduled
    or the stub cannot reach the point at all.
    """
    from . import timeline

    timing = motion.points[point]
    if timing.always:
        return timeline.UNIVERSE
    if t_start is None or not timing.reachable:
        return timeline.EMPTY
    return timeline.TimePeriod.of(t_start + timing.pass_ms, t_start + timing.ret_ms)


def morphing_groups(
    layout: GraphLayout, records: Sequence[IntersectionRecord]
) -> list[list[object]]:
    """Partition edges into groups whose morph timings can interact.

    Two edges belong together when they share a crossing point, taking the
    transitive closure; crossing-free edges form singleton groups.
    """
    parent: dict[object, object] = {e.id: e.id for e in layout.edges}

    def find(x: object) -> object:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rec in records:
        ra, rb = find(rec.edge), find(rec.opposite)
        if ra != rb:
            parent[ra] = rb
    groups: dict[object, list[object]] = {}
    for e in layout.edges:
        groups.setdefault(find(e.id), []).append(e.id)
    return sorted((sorted(g, key=str) for g in groups.values()), key=lambda g: str(g[0]))


@dataclass(frozen=True)
class DirectedPoint:
    """Denormalized per-edge view of one crossing point, ready for scheduling.

    Carries this side's grid timing plus the opposite side's, so period
    construction never needs another lookup.
    """

    point: PointKey
    other: object
    pass_ms: int
    ret_ms: int
    always: bool
    point_class: str
    other_pass_ms: int
    other_ret_ms: int
    other_always: bool
    other_reachable: bool
    distance: float
    other_distance: float


class ScheduleProblem:
    """Everything derived from one layout + profile that scheduling needs.

    Exposes classified records, grid kinematics, per-edge directed point
    views (reachable points only), morphing groups, and always-crossing
    counts for the controllable-number rule.
    """

    def __init__(self, layout: GraphLayout, profile: MorphProfile):
        self.layout = layout
        self.profile = profile
        self.records = classify_intersections(compute_intersections(layout), layout, profile)
        self.motions = stub_motions(layout, profile, self.records)
        self.groups = morphing_groups(layout, self.records)
        self.points: dict[object, tuple[DirectedPoint, ...]] = {e.id: () for e in layout.edges}
        self.always_crossing_count: dict[object, int] = {e.id: 0 for e in layout.edges}
        per_edge: dict[object, list[DirectedPoint]] = {e.id: [] for e in layout.edges}
        dist = {(rec.edge, rec.point): rec.d for rec in self.records}
        for rec in self.records:
            own = self.motions[rec.edge].points[rec.point]
            opp = self.motions[rec.opposite].points[rec.point]
            if rec.point_class == ALWAYS_CROSSING:
                self.always_crossing_count[rec.edge] += 1
            if not own.reachable:
                continue  # the stub never gets there; no constraint either way
            per_edge[rec.edge].append(
                DirectedPoint(
                    rec.point,
                    rec.opposite,
                    own.pass_ms,
                    own.ret_ms,
                    own.always,
                    rec.point_class,
                    opp.pass_ms,
                    opp.ret_ms,
                    opp.always,
                    opp.reachable,
                    rec.d,
                    dist[(rec.opposite, rec.point)],
                )
            )
        for eid, lst in per_edge.items():
            lst.sort(key=lambda dp: str(dp.point))
            self.points[eid] = tuple(lst)
        self.point_view: dict[object, dict[PointKey, DirectedPoint]] = {
            eid: {dp.point: dp for dp in lst} for eid, lst in self.points.items()
        }

    def trip_ms(self, edge: object) -> int:
        return self.motions[edge].trip_ms

    def edge_ids(self) -> list[object]:
        return [e.id for e in self.layout.edges]
