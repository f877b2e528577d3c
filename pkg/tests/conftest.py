from pathlib import Path

import pytest

from linkboot import build_graph

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def canonical_dir():
    return FIXTURES / "canonical"


def undirected(edges, n=None):
    return build_graph(edges, directed=False, node_count=n)


def directed(edges, n=None):
    return build_graph(edges, directed=True, node_count=n)


def label_index(names):
    """Map single-letter node names to indices in the given order."""
    return {c: i for i, c in enumerate(names)}


ACCEPTANCE_LINES: list[str] = []


def verdict(number: int, title: str, ok: bool, detail: str) -> None:
    """Record and print one acceptance line, then fail the test if needed."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
