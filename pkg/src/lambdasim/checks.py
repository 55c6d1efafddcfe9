"""Randomized cross-check of adaptive admission against the exhaustive oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from lambdasim.rwa import Accepted, ConnectionRequest, admit_adaptive, oracle_feasible
from lambdasim.topology import Link, Topology, new_network_state
from lambdasim.state import NetworkState


@dataclass
class OracleReport:
    checks: int = 0
    agreements: int = 0
    feasible: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checks > 0 and self.agreements == self.checks


def random_connected_topology(rng: random.Random, max_nodes: int = 8, max_wavelengths: int = 4) -> Topology:
    """Random spanning tree plus random chords; integer costs 1..3, 1-2 fibers per link."""
    n = rng.randint(2, max_nodes)
    edges: set[tuple[int, int]] = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    density = rng.random()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density * 0.5:
                edges.add((u, v))
    links = tuple(
        Link(id=i, a=u, b=v, cost=float(rng.randint(1, 3)), fibers=rng.randint(1, 2))
        for i, (u, v) in enumerate(sorted(edges))
    )
    return Topology(name=f"random{n}", node_count=n, links=links, wavelengths=rng.randint(1, max_wavelengths))


def random_occupancy(topology: Topology, rng: random.Random) -> NetworkState:
    state = new_network_state(topology)
    p = rng.random()
    for link in topology.links:
        for fiber in range(link.fibers):
            for w in range(topology.wavelengths):
                if rng.random() < p:
                    state.occupy(link.id, fiber, w, owner=-1)
    return state


def run_oracle_check(graphs: int = 200, states: int = 50, seed: int = 0, max_nodes: int = 8,
                     max_wavelengths: int = 4) -> OracleReport:
    rng = random.Random(seed)
    report = OracleReport()
    for g in range(graphs):
        topology = random_connected_topology(rng, max_nodes, max_wavelengths)
        for k in range(states):
            state = random_occupancy(topology, rng)
            s, d = rng.sample(range(topology.node_count), 2)
            expected = oracle_feasible(state, s, d)
            got = isinstance(admit_adaptive(state.copy(), ConnectionRequest(0, s, d)), Accepted)
            report.checks += 1
            report.feasible += expected
            if got == expected:
                report.agreements += 1
            else:
                report.failures.append(f"graph {g} state {k} pair ({s},{d}): adaptive={got} oracle={expected}")
    return report
