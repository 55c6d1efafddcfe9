"""Admission control: route + wavelength decisions, release, and a brute-force feasibility oracle."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Sequence, Union

from lambdasim.routing import Path, adaptive_route
from lambdasim.state import ChannelError, NetworkState
from lambdasim.wavelength import Policy, assign_wavelength, path_availability

__all__ = [
    "Accepted",
    "BlockReason",
    "Blocked",
    "ConnectionRequest",
    "Decision",
    "Lightpath",
    "ORACLE_MAX_NODES",
    "Provisioning",
    "admit_adaptive",
    "admit_multipath",
    "admit_sequential",
    "oracle_feasible",
    "release",
]


@dataclass(frozen=True)
class ConnectionRequest:
    id: int
    source: int
    destination: int
    demand: int = 1
    arrival_time: float = 0.0
    holding_time: float = 1.0

    def __post_init__(self) -> None:
        if self.source == self.destination:
            raise ValueError(f"request {self.id}: source equals destination")
        if self.demand < 1:
            raise ValueError(f"request {self.id}: demand must be >= 1")
        if self.arrival_time < 0 or not self.holding_time > 0:
            raise ValueError(f"request {self.id}: bad timing")


@dataclass(frozen=True)
class Lightpath:
    """One wavelength end to end on one route; ``fibers[i]`` is the fiber used on ``path.links[i]``."""

    path: Path
    wavelength: int
    fibers: tuple[int, ...]

    def channels(self) -> list[tuple[int, int, int]]:
        return [(link, fiber, self.wavelength) for link, fiber in zip(self.path.links, self.fibers)]


@dataclass(frozen=True)
class Provisioning:
    request_id: int
    lightpaths: tuple[Lightpath, ...]

    @property
    def paths_used(self) -> int:
        return len({lp.path.nodes for lp in self.lightpaths})

    @property
    def total_cost(self) -> float:
        return sum(lp.path.cost for lp in self.lightpaths)


class BlockReason(str, enum.Enum):
    NO_ROUTE = "no_route"
    NO_WAVELENGTH = "no_wavelength"
    INSUFFICIENT_CAPACITY = "insufficient_capacity"


@dataclass(frozen=True)
class Accepted:
    provisioning: Provisioning


@dataclass(frozen=True)
class Blocked:
    reason: BlockReason


Decision = Union[Accepted, Blocked]


def _occupy(state: NetworkState, owner: int, path: Path, wavelength: int) -> Lightpath:
    fibers = []
    for link in path.links:
        fiber = state.first_free_fiber(link, wavelength)
        if fiber is None:
            raise ChannelError(f"wavelength {wavelength} has no free fiber on link {link}")
        fibers.append(fiber)
    for link, fiber in zip(path.links, fibers):
        state.occupy(link, fiber, wavelength, owner)
    return Lightpath(path, wavelength, tuple(fibers))


def _require_single(request: ConnectionRequest) -> None:
    if request.demand != 1:
        raise ValueError(f"request {request.id}: single-path admission needs demand 1, got {request.demand}")


def admit_sequential(
    state: NetworkState,
    request: ConnectionRequest,
    routes: Sequence[Path],
    policy: Policy = Policy.FIRST_FIT,
    rng: random.Random | None = None,
) -> Decision:
    """Try ``routes`` in order; the first with any continuous wavelength wins.

    Fixed routing passes one route, fixed-alternate passes the whole table entry.
    """
    _require_single(request)
    if not routes:
        return Blocked(BlockReason.NO_ROUTE)
    for path in routes:
        mask = path_availability(state, path)
        if mask:
            w = assign_wavelength(policy, mask, state.usage, rng)
            lightpath = _occupy(state, request.id, path, w)
            return Accepted(Provisioning(request.id, (lightpath,)))
    return Blocked(BlockReason.NO_WAVELENGTH)


def admit_adaptive(state: NetworkState, request: ConnectionRequest) -> Decision:
    """AR-FFWA: layered adaptive route, first-fit wavelength on ties."""
    _require_single(request)
    found = adaptive_route(state, request.source, request.destination)
    if found is None:
        return Blocked(BlockReason.NO_WAVELENGTH)
    path, w = found
    lightpath = _occupy(state, request.id, path, w)
    return Accepted(Provisioning(request.id, (lightpath,)))


def _check_disjoint(candidates: Sequence[Path]) -> None:
    used: set[int] = set()
    for path in candidates:
        if used.intersection(path.links):
            raise ValueError("multipath candidates must be pairwise link-disjoint")
        used.update(path.links)


def admit_multipath(
    state: NetworkState,
    request: ConnectionRequest,
    candidates: Sequence[Path],
    g: int,
    rng: random.Random | None = None,
    policy: Policy = Policy.FIRST_FIT,
) -> Decision:
    """Split ``request.demand`` channels over at most ``g`` disjoint candidates.

    Candidates with more free wavelengths go first (ties: cheaper, then
    canonical order).  Nothing is occupied unless the whole demand fits.
    """
    if g < 1:
        raise ValueError("granularity g must be >= 1")
    _check_disjoint(candidates)
    if not candidates:
        return Blocked(BlockReason.NO_ROUTE)

    ranked = sorted(
        ((path_availability(state, p), p) for p in candidates),
        key=lambda item: (-item[0].bit_count(), item[1].key),
    )
    plan: list[tuple[Path, int]] = []
    remaining = request.demand
    routes_used = 0
    usage = list(state.usage)
    for mask, path in ranked:
        if remaining == 0 or routes_used == g:
            break
        if not mask:
            continue
        routes_used += 1
        while remaining and mask:
            w = assign_wavelength(policy, mask, usage, rng)
            mask &= ~(1 << w)
            usage[w] += path.hops
            plan.append((path, w))
            remaining -= 1
    if remaining:
        return Blocked(BlockReason.INSUFFICIENT_CAPACITY)
    # candidates are disjoint and each (path, w) is distinct, so the plan cannot collide
    lightpaths = tuple(_occupy(state, request.id, path, w) for path, w in plan)
    return Accepted(Provisioning(request.id, lightpaths))


def release(state: NetworkState, provisioning: Provisioning) -> NetworkState:
    """Free every channel of ``provisioning``; raises ChannelError if any is not held by it."""
    channels = [ch for lp in provisioning.lightpaths for ch in lp.channels()]
    owner = provisioning.request_id
    for key in channels:
        if state.owner.get(key) != owner:
            raise ChannelError(f"request {owner} does not hold channel {key}")
    for link, fiber, w in channels:
        state.vacate(link, fiber, w, owner)
    return state


ORACLE_MAX_NODES = 10


def oracle_feasible(state: NetworkState, s: int, d: int) -> bool:
    """Exhaustive check: is there any simple path with one wavelength free on all its links?

    Deliberately naive: enumerates every simple path by DFS and reads the
    per-fiber bitmasks directly, without touching the routing module or the
    cached per-link views.
    """
    topology = state.topology
    if topology.node_count > ORACLE_MAX_NODES:
        raise ValueError(f"oracle limited to {ORACLE_MAX_NODES} nodes")
    neighbors: dict[int, list[tuple[int, int]]] = {u: [] for u in range(topology.node_count)}
    for link in topology.links:
        neighbors[link.a].append((link.b, link.id))
        neighbors[link.b].append((link.a, link.id))

    def link_wavelengths(link_id: int) -> set[int]:
        free = set()
        for fiber_mask in state.free[link_id]:
            for w in range(topology.wavelengths):
                if fiber_mask >> w & 1:
                    free.add(w)
        return free

    paths: list[list[int]] = []

    def walk(node: int, visited: list[int], links: list[int]) -> None:
        if node == d:
            paths.append(list(links))
            return
        for nxt, link_id in neighbors[node]:
            if nxt not in visited:
                visited.append(nxt)
                links.append(link_id)
                walk(nxt, visited, links)
                links.pop()
                visited.pop()

    walk(s, [s], [])
    for links in paths:
        for w in range(topology.wavelengths):
            if all(w in link_wavelengths(link_id) for link_id in links):
                return True
    return False
