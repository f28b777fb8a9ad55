"""Shared registry for acceptance-criterion outcomes.

test_acceptance.py records one entry per criterion; the conftest terminal
hook prints them as a PASS/FAIL line each at the end of the run.
"""

from __future__ import annotations

from contextlib import contextmanager

RESULTS: list[tuple[str, bool, str]] = []


def record(name: str, ok: bool, note: str = "") -> None:
    RESULTS.append((name, ok, note))


@contextmanager
def criterion(name: str):
    """Record and print the outcome of one acceptance criterion."""
    notes: list[str] = []
    try:
        yield notes.append
    except BaseException:
        record(name, False, "; ".join(notes))
        print(f"FAIL  {name}")
        raise
    record(name, True, "; ".join(notes))
    print(f"PASS  {name}" + (f"  ({'; '.join(notes)})" if notes else ""))
