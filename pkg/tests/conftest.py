import numpy as np
import pytest

from graph_advection import build_graph


@pytest.fixture
def chord_cycle():
    """4-node cycle of unit edges with a chord 1 -> 3 of length 2."""
    return build_graph([(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1), (1, 3, 2)])


def random_graph(rng, n, p=None, low=0.1, high=10.0, oriented=False):
    """Random directed graph with uniform edge lengths in [low, high]."""
    p = min(1.0, 3.0 / max(n - 1, 1)) if p is None else p
    edges = []
    for v in range(n):
        for u in range(n):
            if u == v or rng.random() >= p:
                continue
            if oriented and u < v:
                continue
            edges.append((v, u, rng.uniform(low, high)))
    return build_graph(edges, n)


def unit(n, v):
    f = np.zeros(n)
    f[v] = 1.0
    return f


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance[report.nodeid] = report
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.failed:
        _acceptance[report.nodeid] = report


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, report in sorted(_acceptance.items()):
        name = nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({report.duration:.2f}s)")
