"""Shared fixtures: worked fixtures, cached circle problems, and one
session-wide CI experiment run (disk-cached keyed on the source tree)."""

from __future__ import annotations

import hashlib
import os
from functools import lru_cache
from pathlib import Path

import pytest

import medsched
from medsched import (
    CI_PRESET,
    GraphLayout,
    MorphProfile,
    ScheduleProblem,
    harness,
)

import acceptance_log

CROSS_PROFILE = MorphProfile(delta=0.25, eta=0.5, speed=100.0, pause=100)


def make_cross_layout() -> GraphLayout:
    """Two length-200 segments crossing at the origin, 100 px from each end."""
    return GraphLayout.from_json(
        {
            "nodes": [
                {"id": "w", "x": -100, "y": 0},
                {"id": "e", "x": 100, "y": 0},
                {"id": "s", "x": 0, "y": -100},
                {"id": "n", "x": 0, "y": 100},
            ],
            "edges": [
                {"id": "h", "a": "w", "b": "e"},
                {"id": "v", "a": "s", "b": "n"},
            ],
        }
    )


@pytest.fixture(scope="session")
def cross_layout() -> GraphLayout:
    return make_cross_layout()


@pytest.fixture(scope="session")
def cross_problem(cross_layout) -> ScheduleProblem:
    return ScheduleProblem(cross_layout, CROSS_PROFILE)


@lru_cache(maxsize=None)
def circle_problem(n: int, delta: float) -> ScheduleProblem:
    """One ScheduleProblem per experiment cell, shared across the session."""
    layout = medsched.generate_circle_layout(n, 200.0)
    return ScheduleProblem(layout, MorphProfile(delta, 0.5, 100.0, 100))


def _source_digest() -> str:
    src = Path(medsched.__file__).parent
    h = hashlib.sha256()
    for p in sorted(src.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    h.update(repr(CI_PRESET).encode())
    return h.hexdigest()[:16]


@pytest.fixture(scope="session")
def ci_rows():
    """Rows of one CI-preset experiment run.

    The run takes several minutes, so the CSV is cached under /tmp keyed by
    a digest of the package sources; any code change forces a fresh run.
    """
    cache_dir = Path(os.environ.get("TMPDIR", "/tmp")) / "medsched-test-cache"
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"ci-{_source_digest()}.csv"
    if path.exists():
        return harness.read_csv(str(path))
    return harness.run_experiment(CI_PRESET, csv_path=str(path))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, note in acceptance_log.RESULTS:
        line = f"{'PASS' if ok else 'FAIL'}  {name}"
        if note:
            line += f"  ({note})"
        terminalreporter.write_line(line)
