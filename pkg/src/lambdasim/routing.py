"""Candidate route computation.

All searches use one canonical order on paths: ascending cost, then
fewer hops, then the lexicographically smaller node sequence.  That order
is preserved when a common prefix or suffix is appended, so a plain
Dijkstra keyed on ``(cost, hops, nodes)`` returns the canonical minimum
and Yen's algorithm enumerates paths in canonical order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Sequence

if TYPE_CHECKING:
    from lambdasim.state import NetworkState
    from lambdasim.topology import Topology

__all__ = [
    "Path",
    "RoutingTable",
    "adaptive_route",
    "build_routing_tables",
    "k_shortest_paths",
    "link_disjoint_paths",
    "shortest_path",
]

INF = math.inf


@dataclass(frozen=True)
class Path:
    nodes: tuple[int, ...]
    links: tuple[int, ...]
    cost: float

    @property
    def hops(self) -> int:
        return len(self.links)

    @property
    def key(self) -> tuple[float, int, tuple[int, ...]]:
        return (self.cost, len(self.links), self.nodes)

    @classmethod
    def from_nodes(cls, topology: Topology, nodes: Sequence[int]) -> Path:
        links = []
        for u, v in zip(nodes, nodes[1:]):
            link = topology.link_between(u, v)
            if link is None:
                raise ValueError(f"no link between {u} and {v}")
            links.append(link)
        cost = 0.0
        for link in links:
            cost += topology.links[link].cost
        return cls(tuple(nodes), tuple(links), cost)

    def __str__(self) -> str:
        return "-".join(map(str, self.nodes))


def _check_pair(topology: Topology, s: int, d: int) -> None:
    if s == d:
        raise ValueError(f"source and destination are both {s}")
    for node in (s, d):
        if not 0 <= node < topology.node_count:
            raise ValueError(f"node {node} out of range")


def _dijkstra(
    topology: Topology,
    link_costs: Sequence[float],
    s: int,
    d: int,
    banned_nodes: frozenset[int] | set[int] = frozenset(),
) -> Path | None:
    adjacency = topology.adjacency
    best: dict[int, tuple] = {s: (0.0, 0, (s,))}
    heap: list[tuple[float, int, tuple[int, ...], tuple[int, ...]]] = [(0.0, 0, (s,), ())]
    done: set[int] = set(banned_nodes)
    while heap:
        cost, hops, nodes, links = heapq.heappop(heap)
        u = nodes[-1]
        if u in done:
            continue
        if u == d:
            return Path(nodes, links, cost)
        done.add(u)
        for v, link in adjacency[u]:
            if v in done:
                continue
            weight = link_costs[link]
            if weight == INF:
                continue
            label = (cost + weight, hops + 1, nodes + (v,))
            prev = best.get(v)
            if prev is None or label < prev:
                best[v] = label
                heapq.heappush(heap, (label[0], label[1], label[2], links + (link,)))
    return None


def shortest_path(topology: Topology, link_costs: Sequence[float] | None, s: int, d: int) -> Path | None:
    """Canonical minimum-cost path using only finite-cost links.

    ``link_costs`` defaults to the topology's own link costs.  The returned
    ``Path.cost`` is the sum of ``link_costs`` along the route.
    """
    _check_pair(topology, s, d)
    costs = topology.costs if link_costs is None else link_costs
    if len(costs) != len(topology.links):
        raise ValueError("link_costs must have one entry per link")
    return _dijkstra(topology, costs, s, d)


def iter_shortest_paths(topology: Topology, s: int, d: int) -> Iterator[Path]:
    """Yen's loopless enumeration, yielding paths in canonical order."""
    _check_pair(topology, s, d)
    base_costs = topology.costs
    first = _dijkstra(topology, base_costs, s, d)
    if first is None:
        return
    accepted: list[Path] = [first]
    seen = {first.nodes}
    candidates: list[tuple[float, int, tuple[int, ...], Path]] = []
    yield first
    while True:
        prev = accepted[-1]
        for i in range(len(prev.nodes) - 1):
            spur = prev.nodes[i]
            root_nodes = prev.nodes[: i + 1]
            root_links = prev.links[:i]
            costs = list(base_costs)
            for path in accepted:
                if path.nodes[: i + 1] == root_nodes:
                    costs[path.links[i]] = INF
            tail = _dijkstra(topology, costs, spur, d, banned_nodes=set(root_nodes[:-1]))
            if tail is None:
                continue
            nodes = root_nodes + tail.nodes[1:]
            if nodes in seen:
                continue
            seen.add(nodes)
            root_cost = 0.0
            for link in root_links:
                root_cost += base_costs[link]
            candidate = Path(nodes, root_links + tail.links, root_cost + tail.cost)
            heapq.heappush(candidates, (candidate.cost, candidate.hops, candidate.nodes, candidate))
        if not candidates:
            return
        path = heapq.heappop(candidates)[3]
        accepted.append(path)
        yield path


def k_shortest_paths(topology: Topology, s: int, d: int, k: int) -> list[Path]:
    if k < 1:
        raise ValueError("k must be positive")
    paths = []
    for path in iter_shortest_paths(topology, s, d):
        paths.append(path)
        if len(paths) == k:
            break
    return paths


def link_disjoint_paths(topology: Topology, s: int, d: int, n: int) -> list[Path]:
    """Greedy disjoint set: take the shortest path, delete its links, repeat."""
    _check_pair(topology, s, d)
    if n < 1:
        raise ValueError("n must be positive")
    costs = list(topology.costs)
    paths: list[Path] = []
    while len(paths) < n:
        path = _dijkstra(topology, costs, s, d)
        if path is None:
            break
        paths.append(path)
        for link in path.links:
            costs[link] = INF
    return paths


@dataclass(frozen=True)
class RoutingTable:
    """Precomputed ordered route lists for every ordered node pair."""

    n: int
    disjoint: bool
    entries: dict[tuple[int, int], tuple[Path, ...]]

    def __getitem__(self, pair: tuple[int, int]) -> tuple[Path, ...]:
        return self.entries[pair]

    def __len__(self) -> int:
        return len(self.entries)

    def routes(self, s: int, d: int) -> tuple[Path, ...]:
        return self.entries[(s, d)]

    def fixed(self, s: int, d: int) -> tuple[Path, ...]:
        """The single predetermined route (first entry), or nothing if unreachable."""
        return self.entries[(s, d)][:1]


def build_routing_tables(topology: Topology, n: int, disjoint: bool = False) -> RoutingTable:
    if n < 1:
        raise ValueError("n must be positive")
    entries: dict[tuple[int, int], tuple[Path, ...]] = {}
    for s in range(topology.node_count):
        for d in range(topology.node_count):
            if s == d:
                continue
            if disjoint:
                paths = link_disjoint_paths(topology, s, d, n)
            else:
                paths = k_shortest_paths(topology, s, d, n)
            entries[(s, d)] = tuple(paths)
    return RoutingTable(n=n, disjoint=disjoint, entries=entries)


_CACHE_LIMIT = 200_000


def _layer_path(state: NetworkState, s: int, d: int, layer: int) -> Path | None:
    """Shortest path restricted to the links in bitmask ``layer``, memoized on the state."""
    cache = state.route_cache
    key = (s, d, layer)
    try:
        return cache[key]
    except KeyError:
        pass
    topology = state.topology
    costs = [cost if layer >> i & 1 else INF for i, cost in enumerate(topology.costs)]
    path = _dijkstra(topology, costs, s, d)
    if len(cache) >= _CACHE_LIMIT:
        cache.clear()
    cache[key] = path
    return path


def _reachable_layers(state: NetworkState, s: int, d: int) -> int:
    """Bitmask of wavelengths whose layer connects ``s`` to ``d``.

    Flood fill carrying a wavelength bitmask per node, so all layers are
    explored in one pass.
    """
    adjacency = state.topology.adjacency
    link_free = state.link_free
    reach = [0] * state.topology.node_count
    reach[s] = state.full_mask
    stack = [s]
    while stack:
        u = stack.pop()
        ru = reach[u]
        for v, link in adjacency[u]:
            new = ru & link_free[link] & ~reach[v]
            if new:
                reach[v] |= new
                stack.append(v)
    return reach[d]


def adaptive_route(state: NetworkState, s: int, d: int) -> tuple[Path, int] | None:
    """Layered shortest-path search on the live state.

    For every wavelength whose layer connects the pair, take the canonical
    shortest path in that layer; return the cheapest, preferring the lowest
    wavelength on equal cost.
    """
    _check_pair(state.topology, s, d)
    layers = _reachable_layers(state, s, d)
    best: tuple[Path, int] | None = None
    tried: set[int] = set()
    layer_links = state.layer_links
    while layers:
        low = layers & -layers
        layers ^= low
        w = low.bit_length() - 1
        key = layer_links[w]
        if key in tried:
            # same link set as a lower wavelength, which already wins the tie
            continue
        tried.add(key)
        path = _layer_path(state, s, d, key)
        if path is not None and (best is None or path.cost < best[0].cost):
            best = (path, w)
    return best
