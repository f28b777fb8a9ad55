"""Debug rendering: SVG snapshots of stub states at chosen instants.

Each frame draws the full edges faintly, the two stubs of every edge at
their current length, and highlights intersection points where both stubs
cover the crossing at that instant.
"""

from __future__ import annotations

import os
from typing import Sequence

from .geometry import GraphLayout, MorphProfile, ScheduleProblem
from .validator import edge_ratio_at


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def _replayed(starts: Sequence[int], cycle: int, t_ms: float) -> list[float]:
    if not starts:
        return []
    if cycle <= 0:
        return [float(s) for s in starts]
    reps = int(t_ms // cycle) + 1
    return [float(s + r * cycle) for r in range(reps + 1) for s in starts]


def render_frames(
    layout: GraphLayout,
    schedule,
    times: Sequence[int],
    out_dir: str,
    profile: MorphProfile | None = None,
    problem: ScheduleProblem | None = None,
) -> list[str]:
    """Write one SVG per requested time; returns the file paths."""
    if profile is None:
        profile = getattr(schedule, "profile", None)
    if profile is None:
        raise ValueError("no stub profile on the schedule; pass profile=")
    if problem is None:
        problem = ScheduleProblem(layout, profile)
    os.makedirs(out_dir, exist_ok=True)

    xs = [n.x for n in layout.nodes]
    ys = [n.y for n in layout.nodes]
    margin = 20.0
    lo_x, hi_x = min(xs) - margin, max(xs) + margin
    lo_y, hi_y = min(ys) - margin, max(ys) + margin

    paths = []
    for t in times:
        ratios = {}
        for e in layout.edges:
            starts = schedule.starts.get(e.id, ())
            cycle = schedule.group_cycle(e.id) if hasattr(schedule, "group_cycle") else schedule.t_cycle
            ratios[e.id] = edge_ratio_at(
                profile, layout.edge_length(e.id), _replayed(starts, cycle, t), t
            )

        body = [
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="'
            f'{_fmt(lo_x)} {_fmt(lo_y)} {_fmt(hi_x - lo_x)} {_fmt(hi_y - lo_y)}">',
            f'<rect x="{_fmt(lo_x)}" y="{_fmt(lo_y)}" width="{_fmt(hi_x - lo_x)}"'
            f' height="{_fmt(hi_y - lo_y)}" fill="white"/>',
        ]
        for e in layout.edges:
            (ax, ay), (bx, by) = layout.segment(e.id)
            body.append(
                f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}"'
                f' stroke="#dddddd" stroke-width="1"/>'
            )
        for e in layout.edges:
            (ax, ay), (bx, by) = layout.segment(e.id)
            r = ratios[e.id]
            for (sx, sy), (ex_, ey) in (
                ((ax, ay), (ax + r * (bx - ax), ay + r * (by - ay))),
                ((bx, by), (bx - r * (bx - ax), by - r * (by - ay))),
            ):
                body.append(
                    f'<line x1="{_fmt(sx)}" y1="{_fmt(sy)}" x2="{_fmt(ex_)}"'
                    f' y2="{_fmt(ey)}" stroke="#1f3b73" stroke-width="2"/>'
                )
        seen = set()
        for rec in problem.records:
            if rec.point in seen:
                continue
            seen.add(rec.point)
            twin = next(
                r2 for r2 in problem.records
                if r2.point == rec.point and r2.edge == rec.opposite
            )
            if (
                ratios[rec.edge] * layout.edge_length(rec.edge) >= rec.d
                and ratios[twin.edge] * layout.edge_length(twin.edge) >= twin.d
            ):
                (ax, ay), (bx, by) = layout.segment(rec.edge)
                px = ax + rec.s * (bx - ax)
                py = ay + rec.s * (by - ay)
                body.append(
                    f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="5"'
                    f' fill="none" stroke="#cc2222" stroke-width="2"/>'
                )
        for n in layout.nodes:
            body.append(
                f'<circle cx="{_fmt(n.x)}" cy="{_fmt(n.y)}" r="3" fill="#222222"/>'
            )
        body.append("</svg>")
        path = os.path.join(out_dir, f"frame_{int(t):08d}ms.svg")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(body) + "\n")
        paths.append(path)
    return paths
