from __future__ import annotations

import pytest

from rdindex import build_index, synth
from rdindex.graph import EdgeRecord, build_graph

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str, expected_fail: bool = False) -> None:
    status = ("XPASS" if ok else "XFAIL") if expected_fail else ("PASS" if ok else "FAIL")
    line = f"{status}  [{criterion}] {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example():
    g = synth.example_graph()
    return g, build_index(g)


@pytest.fixture(scope="session")
def triangle_pair():
    """Two disjoint triangles: labels 0-2 and 10-12."""
    edges = [(0, 1), (1, 2), (2, 0), (10, 11), (11, 12), (12, 10)]
    return build_graph([EdgeRecord(u, v) for u, v in edges])
