import numpy as np
import pytest

from cclp import Graph, load_edge_list

ACCEPTANCE_RESULTS = {}  # criterion -> list of (status, detail)


def record(criterion, status, detail):
    ACCEPTANCE_RESULTS.setdefault(criterion, []).append((status, detail))


def edges_graph(lines):
    return load_edge_list("\n".join(lines))


@pytest.fixture
def triangle():
    return edges_graph(["a b", "b c", "c a"])


@pytest.fixture
def path3():
    return edges_graph(["a b", "b c"])


@pytest.fixture
def star():
    return edges_graph(["hub l1", "hub l2", "hub l3", "hub l4"])


@pytest.fixture
def square():
    return edges_graph(["a b", "b c", "c d", "d a"])


@pytest.fixture
def diamond():
    """{ab, ac, bc, bd, cd}: two triangles sharing the edge bc."""
    return edges_graph(["a b", "a c", "b c", "b d", "c d"])


@pytest.fixture
def k4():
    return edges_graph(["a b", "a c", "a d", "b c", "b d", "c d"])


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].shape[0]) < p
    return Graph.from_edges(np.column_stack([iu[0][keep], iu[1][keep]]), n_nodes=n)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        parts = ACCEPTANCE_RESULTS[key]
        statuses = {s for s, _ in parts}
        if "FAIL" in statuses:
            overall = "FAIL"
        elif statuses == {"SKIP"}:
            overall = "SKIP"
        else:
            overall = "PASS" + (" (partial: some datasets unavailable)" if "SKIP" in statuses else "")
        terminalreporter.write_line(f"criterion {key}: {overall}")
        for status, detail in parts:
            terminalreporter.write_line(f"    {status:4} {detail}")
