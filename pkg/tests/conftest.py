import pytest

from lambdasim.topology import Link, Topology, builtin_topology, load_topology


def make_topology(edges, nodes=None, wavelengths=2, fibers=1, name="t"):
    """edges: (a, b) or (a, b, cost) tuples."""
    links = []
    for i, edge in enumerate(edges):
        a, b = edge[0], edge[1]
        cost = edge[2] if len(edge) > 2 else 1.0
        links.append(Link(id=i, a=min(a, b), b=max(a, b), cost=cost, fibers=fibers))
    if nodes is None:
        nodes = 1 + max(max(e[0], e[1]) for e in edges)
    return Topology(name=name, node_count=nodes, links=tuple(links), wavelengths=wavelengths, default_fibers=fibers)


@pytest.fixture
def triangle():
    return make_topology([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], wavelengths=2)


@pytest.fixture
def line2():
    return builtin_topology("line2").with_capacity(wavelengths=2)


@pytest.fixture
def cycle4():
    return make_topology([(0, 1), (1, 2), (2, 3), (3, 0)], wavelengths=2)


@pytest.fixture
def nsfnet():
    return builtin_topology("nsfnet14")


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
