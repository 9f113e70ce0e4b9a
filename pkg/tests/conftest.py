import numpy as np
import pytest

from mdcolgen.graph import Graph

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def record(criterion: int, ok: bool, detail: str, outcome: str = None) -> None:
    outcome = outcome or ("PASS" if ok else "FAIL")
    line = f"criterion {criterion:>2}: {outcome}  {detail}"
    ACCEPTANCE_LINES[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def random_graph(rng, n, p) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)
                                if rng.random() < p])


def k4_pendant() -> Graph:
    return Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
