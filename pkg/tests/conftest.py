from __future__ import annotations

import pytest

from dpcolor.cover import Cover
from dpcolor.graph import cycle

# Outcome lines from tests/test_acceptance.py, printed once at the end of the run.
ACCEPTANCE_LINES: list[tuple[int, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


def c4_cover_pair() -> tuple[Cover, Cover]:
    """The two 2-fold covers of the 4-cycle 0-1-2-3-0.

    The first matches slot i to slot i on every edge; the second crosses the
    matching on the edge {3, 0}, which leaves no colouring.
    """
    g = cycle(4)
    straight = [(u, i, (u + 1) % 4, i) for u in range(4) for i in range(2)]
    twisted = [p for p in straight if {p[0], p[2]} != {3, 0}] + [(3, 0, 0, 1), (3, 1, 0, 0)]
    return Cover(g, (2,) * 4, frozenset(straight)), Cover(g, (2,) * 4, frozenset(twisted))


@pytest.fixture
def c4_pair():
    return c4_cover_pair()


def single_fault_mutants() -> list[tuple[str, str, Cover]]:
    """Twelve corruptions of the straight 4-cycle cover, three per axiom.

    Each entry is ``(name, axiom, cover)``; every mutant breaks exactly one
    axiom at exactly one place.
    """
    good, _ = c4_cover_pair()
    g, sizes, pairs = good.base, good.sizes, set(good.pairs)
    off_vertex_3 = {p for p in pairs if 3 not in (p[0], p[2])}
    return [
        ("short list table", "C1", Cover(g, (2, 2, 2), frozenset(off_vertex_3))),
        ("negative list size", "C1", Cover(g, (2, 2, 2, -1), frozenset(off_vertex_3))),
        ("endpoint outside every list", "C1", Cover(g, sizes, frozenset(pairs | {(0, 0, 1, 5)}))),
        ("intra-list pair", "C2", Cover(g, sizes, frozenset(pairs | {(1, 0, 1, 1)}))),
        ("self-loop pair", "C2", Cover(g, sizes, frozenset(pairs | {(2, 1, 2, 1)}))),
        ("intra-list pair, 3 slots", "C2", Cover(g, (2, 2, 3, 2), frozenset(pairs | {(2, 0, 2, 2)}))),
        ("pair on non-edge 0-2", "C3", Cover(g, sizes, frozenset(pairs | {(0, 0, 2, 1)}))),
        ("pair on non-edge 1-3", "C3", Cover(g, sizes, frozenset(pairs | {(1, 1, 3, 1)}))),
        ("pair on non-edge, ragged", "C3", Cover(g, (3, 2, 3, 2), frozenset(pairs | {(0, 2, 2, 2)}))),
        ("left end matched twice", "C4", Cover(g, (2, 3, 2, 2), frozenset(pairs | {(0, 0, 1, 2)}))),
        ("right end matched twice", "C4", Cover(g, (2, 2, 3, 2), frozenset(pairs | {(2, 2, 3, 0)}))),
        ("twice on edge 3-0", "C4", Cover(g, (2, 2, 2, 3), frozenset(pairs | {(3, 2, 0, 1)}))),
    ]
