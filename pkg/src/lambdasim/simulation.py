"""Discrete-event engine and load-sweep runner."""

from __future__ import annotations

import heapq
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, NamedTuple

from lambdasim.metrics import MetricsAccumulator, ResultRow
from lambdasim.routing import RoutingTable, build_routing_tables
from lambdasim.rwa import (
    Accepted,
    ConnectionRequest,
    Decision,
    admit_adaptive,
    admit_multipath,
    admit_sequential,
    release,
)
from lambdasim.state import NetworkState
from lambdasim.topology import Topology, new_network_state, resolve_topology
from lambdasim.wavelength import Policy

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "Event",
    "EventKind",
    "RandomStream",
    "ScenarioConfig",
    "Simulator",
    "generate_workload",
    "run_scenario",
    "simulate_point",
    "tables_for",
]


class ConfigError(ValueError):
    pass


_POLICY_SUFFIX = {"ff": Policy.FIRST_FIT, "rand": Policy.RANDOM, "mu": Policy.MOST_USED, "lu": Policy.LEAST_USED}

ALGORITHMS: dict[str, tuple[str, Policy]] = {
    **{f"fixed-{s}": ("fixed", p) for s, p in _POLICY_SUFFIX.items()},
    **{f"alt-{s}": ("alt", p) for s, p in _POLICY_SUFFIX.items()},
    "ar-ff": ("adaptive", Policy.FIRST_FIT),
    "mp-arff": ("multipath", Policy.FIRST_FIT),
}


@dataclass(frozen=True)
class ScenarioConfig:
    topology: str
    algorithm: str
    loads: tuple[float, ...]
    requests_per_point: int
    seed: int
    wavelengths: int | None = None
    fibers: int | None = None
    alternate_routes: int = 3
    granularity: int = 1
    demand_max: int = 1
    warmup_discard: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "loads", tuple(float(x) for x in self.loads))
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r} (choose from {', '.join(ALGORITHMS)})")
        if not self.loads:
            raise ConfigError("loads must not be empty")
        if any(not (math.isfinite(x) and x > 0) for x in self.loads):
            raise ConfigError("every load must be a positive number")
        positive = {
            "requests_per_point": self.requests_per_point,
            "alternate_routes": self.alternate_routes,
            "granularity": self.granularity,
            "demand_max": self.demand_max,
            "workers": self.workers,
        }
        if self.wavelengths is not None:
            positive["wavelengths"] = self.wavelengths
        if self.fibers is not None:
            positive["fibers"] = self.fibers
        for name, value in positive.items():
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if self.demand_max > 1 and self.kind != "multipath":
            raise ConfigError(f"demand_max > 1 needs a multi-path algorithm, not {self.algorithm}")

    @property
    def kind(self) -> str:
        return ALGORITHMS[self.algorithm][0]

    @property
    def policy(self) -> Policy:
        return ALGORITHMS[self.algorithm][1]

    def as_dict(self) -> dict:
        data = asdict(self)
        data["loads"] = list(self.loads)
        return data

    def build_topology(self) -> Topology:
        return resolve_topology(self.topology).with_capacity(self.wavelengths, self.fibers)


class RandomStream:
    """Independent, reproducible sub-streams for workload and random wavelength choice."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self.workload = random.Random(f"{seed}/workload")
        self.policy = random.Random(f"{seed}/policy")


class EventKind(str, Enum):
    ARRIVAL = "arrival"
    DEPARTURE = "departure"


class Event(NamedTuple):
    time: float
    sequence: int
    kind: EventKind
    request: ConnectionRequest


def generate_workload(
    node_count: int,
    load: float,
    requests: int,
    rng: random.Random,
    demand_max: int = 1,
) -> list[Event]:
    """Poisson arrivals at rate ``load`` with unit-mean exponential holding times.

    With mean holding time 1 the offered network load equals ``load`` Erlangs.
    Node pairs are uniform over ordered pairs with distinct endpoints.
    """
    if not load > 0:
        raise ConfigError(f"load must be positive, got {load!r}")
    if node_count < 2:
        raise ConfigError("need at least two nodes to generate traffic")
    events = []
    t = 0.0
    for i in range(requests):
        gap = rng.expovariate(load)
        t = t + gap if gap > 0 else math.nextafter(t, math.inf)
        s = int(rng.random() * node_count)
        d = int(rng.random() * (node_count - 1))
        if d >= s:
            d += 1
        demand = 1 + int(rng.random() * demand_max)
        holding = rng.expovariate(1.0) or math.ulp(0.0)
        events.append(Event(t, i, EventKind.ARRIVAL, ConnectionRequest(i, s, d, demand, t, holding)))
    return events


Observer = Callable[[NetworkState, ConnectionRequest], None]


@dataclass
class Simulator:
    """Single-threaded engine for one load point; owns its network state."""

    topology: Topology
    algorithm: str
    tables: RoutingTable | None = None
    granularity: int = 1
    rng: random.Random = field(default_factory=lambda: random.Random(0))

    def __post_init__(self) -> None:
        self.kind, self.policy = ALGORITHMS[self.algorithm]
        if self.tables is None and self.kind != "adaptive":
            raise ConfigError(f"{self.algorithm} needs precomputed routing tables")
        self.state = new_network_state(self.topology)

    def admit(self, request: ConnectionRequest) -> Decision:
        pair = (request.source, request.destination)
        if self.kind == "fixed":
            return admit_sequential(self.state, request, self.tables[pair][:1], self.policy, self.rng)
        if self.kind == "alt":
            return admit_sequential(self.state, request, self.tables[pair], self.policy, self.rng)
        if self.kind == "adaptive":
            return admit_adaptive(self.state, request)
        return admit_multipath(self.state, request, self.tables[pair], self.granularity, self.rng, self.policy)

    def run(
        self,
        arrivals: list[Event],
        warmup: int = 0,
        observer: Observer | None = None,
    ) -> MetricsAccumulator:
        """Process ``arrivals`` plus the departures they spawn until the network drains.

        The first ``warmup`` arrivals change the state but are left out of
        the statistics.  ``observer`` sees the state just before each
        admission decision.
        """
        acc = MetricsAccumulator(wavelengths=self.topology.wavelengths)
        state = self.state
        pending: list[tuple[float, int, object]] = []
        sequence = len(arrivals)
        measuring = warmup == 0
        for index, event in enumerate(arrivals):
            now = event.time
            while pending and (pending[0][0], pending[0][1]) < (now, event.sequence):
                dep_time, _, prov = heapq.heappop(pending)
                release(state, prov)
                for lp in prov.lightpaths:
                    acc.track(dep_time, lp.wavelength, -lp.path.hops)
            if index == warmup:
                acc.open_window(now)
                measuring = True
            request = event.request
            if observer is not None:
                observer(state, request)
            decision = self.admit(request)
            if isinstance(decision, Accepted):
                prov = decision.provisioning
                for lp in prov.lightpaths:
                    acc.track(now, lp.wavelength, lp.path.hops)
                heapq.heappush(pending, (now + request.holding_time, sequence, prov))
                sequence += 1
            if measuring:
                acc.record(decision, request)
        if arrivals:
            acc.close_window(arrivals[-1].time)
        while pending:
            _, _, prov = heapq.heappop(pending)
            release(state, prov)
        return acc


def _warmup_count(config: ScenarioConfig) -> int:
    return config.requests_per_point // 10 if config.warmup_discard else 0


def tables_for(config: ScenarioConfig, topology: Topology) -> RoutingTable | None:
    if config.kind == "adaptive":
        return None
    if config.kind == "fixed":
        return build_routing_tables(topology, 1, disjoint=False)
    if config.kind == "alt":
        return build_routing_tables(topology, config.alternate_routes, disjoint=False)
    return build_routing_tables(topology, config.alternate_routes, disjoint=True)


def simulate_point(
    config: ScenarioConfig,
    topology: Topology,
    tables: RoutingTable | None,
    point_index: int,
    observer: Observer | None = None,
) -> tuple[ResultRow, Simulator]:
    load = config.loads[point_index]
    streams = RandomStream(config.seed ^ point_index)
    arrivals = generate_workload(
        topology.node_count, load, config.requests_per_point, streams.workload, config.demand_max
    )
    sim = Simulator(topology, config.algorithm, tables, config.granularity, streams.policy)
    acc = sim.run(arrivals, warmup=_warmup_count(config), observer=observer)
    row = acc.finalize(
        load=load,
        algorithm=config.algorithm,
        W=topology.wavelengths,
        F=topology.default_fibers,
        g=config.granularity,
        total_channels=topology.total_channels,
    )
    return row, sim


def _run_point(args: tuple[ScenarioConfig, Topology, RoutingTable | None, int]) -> ResultRow:
    config, topology, tables, index = args
    return simulate_point(config, topology, tables, index)[0]


def run_scenario(config: ScenarioConfig, topology: Topology | None = None) -> list[ResultRow]:
    """One result row per load, sorted by load.

    Load point ``i`` runs with seed ``config.seed ^ i`` on a fresh network,
    so rows do not depend on ``config.workers``.
    """
    if topology is None:
        topology = config.build_topology()
    tables = tables_for(config, topology)
    jobs = [(config, topology, tables, i) for i in range(len(config.loads))]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_point, jobs))
    else:
        rows = [_run_point(job) for job in jobs]
    return sorted(rows, key=lambda row: row.load)
