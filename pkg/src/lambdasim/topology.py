"""Network graph model, JSON topology format and the built-in test meshes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

from lambdasim.state import NetworkState

__all__ = [
    "BUILTIN_TOPOLOGIES",
    "Link",
    "Topology",
    "TopologyError",
    "builtin_topology",
    "load_topology",
    "load_topology_file",
    "new_network_state",
    "render_topology",
    "resolve_topology",
]


class TopologyError(ValueError):
    """Raised for malformed topology documents or invalid graph data."""


@dataclass(frozen=True)
class Link:
    """Undirected fiber link. Endpoints are stored with ``a < b``."""

    id: int
    a: int
    b: int
    cost: float = 1.0
    fibers: int = 1

    def other(self, node: int) -> int:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise ValueError(f"node {node} is not an endpoint of link {self.id}")


@dataclass(frozen=True)
class Topology:
    name: str
    node_count: int
    links: tuple[Link, ...]
    wavelengths: int
    default_fibers: int = 1

    def __post_init__(self) -> None:
        _validate(self)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per node, ``(neighbor, link_id)`` pairs sorted by neighbor."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.node_count)]
        for link in self.links:
            adj[link.a].append((link.b, link.id))
            adj[link.b].append((link.a, link.id))
        return tuple(tuple(sorted(entries)) for entries in adj)

    @cached_property
    def link_index(self) -> dict[tuple[int, int], int]:
        index: dict[tuple[int, int], int] = {}
        for link in self.links:
            index[(link.a, link.b)] = link.id
            index[(link.b, link.a)] = link.id
        return index

    @cached_property
    def costs(self) -> tuple[float, ...]:
        return tuple(link.cost for link in self.links)

    @property
    def total_channels(self) -> int:
        return sum(link.fibers for link in self.links) * self.wavelengths

    def link_between(self, u: int, v: int) -> int | None:
        return self.link_index.get((u, v))

    def with_capacity(self, wavelengths: int | None = None, fibers: int | None = None) -> Topology:
        """Copy with W and/or a uniform fiber count overridden."""
        links = self.links
        default_fibers = self.default_fibers
        if fibers is not None:
            links = tuple(replace(link, fibers=fibers) for link in links)
            default_fibers = fibers
        return Topology(
            name=self.name,
            node_count=self.node_count,
            links=links,
            wavelengths=self.wavelengths if wavelengths is None else wavelengths,
            default_fibers=default_fibers,
        )

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.node_count


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _validate(topo: Topology) -> None:
    if not _is_int(topo.node_count) or topo.node_count < 1:
        raise TopologyError(f"nodes must be a positive integer, got {topo.node_count!r}")
    if not _is_int(topo.wavelengths) or topo.wavelengths < 1:
        raise TopologyError(f"wavelengths must be a positive integer, got {topo.wavelengths!r}")
    if not _is_int(topo.default_fibers) or topo.default_fibers < 1:
        raise TopologyError(f"default_fibers must be a positive integer, got {topo.default_fibers!r}")
    seen: dict[tuple[int, int], int] = {}
    for index, link in enumerate(topo.links):
        if link.id != index:
            raise TopologyError(f"link at position {index} has id {link.id}")
        for end in (link.a, link.b):
            if not _is_int(end) or not 0 <= end < topo.node_count:
                raise TopologyError(f"link {index} ({link.a},{link.b}): endpoint {end!r} out of range")
        if link.a == link.b:
            raise TopologyError(f"link {index} ({link.a},{link.b}): self-loop")
        if link.a > link.b:
            raise TopologyError(f"link {index} ({link.a},{link.b}): endpoints must be stored as a < b")
        if isinstance(link.cost, bool) or not isinstance(link.cost, (int, float)):
            raise TopologyError(f"link {index} ({link.a},{link.b}): cost must be a number")
        if not (math.isfinite(link.cost) and link.cost > 0):
            raise TopologyError(f"link {index} ({link.a},{link.b}): nonpositive or non-finite cost {link.cost!r}")
        if not _is_int(link.fibers) or link.fibers < 1:
            raise TopologyError(f"link {index} ({link.a},{link.b}): fibers must be a positive integer")
        pair = (link.a, link.b)
        if pair in seen:
            raise TopologyError(f"link {index} ({link.a},{link.b}): duplicate of link {seen[pair]}")
        seen[pair] = index


_TOP_FIELDS = {"name", "nodes", "wavelengths", "default_fibers", "links"}
_REQUIRED_TOP = ("name", "nodes", "wavelengths", "links")
_LINK_FIELDS = {"a", "b", "cost", "fibers"}


def _from_mapping(doc: Mapping[str, Any]) -> Topology:
    if not isinstance(doc, Mapping):
        raise TopologyError("topology document must be an object")
    unknown = set(doc) - _TOP_FIELDS
    if unknown:
        raise TopologyError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in _REQUIRED_TOP:
        if key not in doc:
            raise TopologyError(f"missing required field {key!r}")
    if not isinstance(doc["name"], str):
        raise TopologyError("name must be a string")
    for key in ("nodes", "wavelengths", "default_fibers"):
        if key in doc and (not _is_int(doc[key]) or doc[key] < 1):
            raise TopologyError(f"{key} must be a positive integer, got {doc[key]!r}")
    default_fibers = doc.get("default_fibers", 1)
    if not isinstance(doc["links"], list):
        raise TopologyError("links must be an array")

    links = []
    for index, item in enumerate(doc["links"]):
        if not isinstance(item, Mapping):
            raise TopologyError(f"links[{index}] must be an object")
        unknown = set(item) - _LINK_FIELDS
        if unknown:
            raise TopologyError(f"links[{index}]: unknown field(s): {', '.join(sorted(unknown))}")
        if "a" not in item or "b" not in item:
            raise TopologyError(f"links[{index}]: both 'a' and 'b' are required")
        a, b = item["a"], item["b"]
        for end in (a, b):
            if not _is_int(end):
                raise TopologyError(f"links[{index}]: endpoint {end!r} is not an integer")
        lo, hi = (a, b) if a <= b else (b, a)
        links.append(
            Link(id=index, a=lo, b=hi, cost=item.get("cost", 1.0), fibers=item.get("fibers", default_fibers))
        )
    return Topology(
        name=doc["name"],
        node_count=doc["nodes"],
        links=tuple(links),
        wavelengths=doc["wavelengths"],
        default_fibers=default_fibers,
    )


def load_topology(source: str | Mapping[str, Any]) -> Topology:
    """Parse a JSON topology document (text or already-decoded mapping)."""
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"invalid JSON: {exc}") from exc
    return _from_mapping(source)


def load_topology_file(path: str | Path) -> Topology:
    return load_topology(Path(path).read_text())


def render_topology(topo: Topology) -> str:
    """Serialize to the JSON format accepted by :func:`load_topology`."""
    links = []
    for link in topo.links:
        entry: dict[str, Any] = {"a": link.a, "b": link.b, "cost": link.cost}
        if link.fibers != topo.default_fibers:
            entry["fibers"] = link.fibers
        links.append(entry)
    doc = {
        "name": topo.name,
        "nodes": topo.node_count,
        "wavelengths": topo.wavelengths,
        "default_fibers": topo.default_fibers,
        "links": links,
    }
    return json.dumps(doc, indent=2)


# NSFNET T1 backbone, 14 nodes / 21 links, in the usual 0-based numbering.
_NSFNET14 = (
    (0, 1), (0, 2), (0, 7), (1, 2), (1, 3), (2, 5), (3, 4), (3, 10),
    (4, 5), (4, 6), (5, 9), (5, 12), (6, 7), (7, 8), (8, 9), (8, 11),
    (8, 13), (10, 11), (10, 13), (11, 12), (12, 13),
)
# Ring plus the four diameters (Wagner graph): 3-regular, 12 links.
_TEST8 = tuple((i, (i + 1) % 8) for i in range(8)) + tuple((i, i + 4) for i in range(4))
# Ring plus six diameters: 3-regular, 18 links.
_TEST12 = tuple((i, (i + 1) % 12) for i in range(12)) + tuple((i, i + 6) for i in range(6))

BUILTIN_TOPOLOGIES: dict[str, tuple[int, tuple[tuple[int, int], ...]]] = {
    "nsfnet14": (14, _NSFNET14),
    "test8": (8, _TEST8),
    "test12": (12, _TEST12),
    "line2": (2, ((0, 1),)),
}

DEFAULT_WAVELENGTHS = 16


def builtin_topology(name: str) -> Topology:
    """Return one of the fixed meshes in :data:`BUILTIN_TOPOLOGIES` with unit costs."""
    try:
        nodes, edges = BUILTIN_TOPOLOGIES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_TOPOLOGIES))
        raise TopologyError(f"unknown topology {name!r} (known: {known})") from None
    links = tuple(Link(id=i, a=min(u, v), b=max(u, v)) for i, (u, v) in enumerate(edges))
    return Topology(name=name, node_count=nodes, links=links, wavelengths=DEFAULT_WAVELENGTHS)


def resolve_topology(ref: str) -> Topology:
    """A built-in name, or else a path to a topology file."""
    if ref in BUILTIN_TOPOLOGIES:
        return builtin_topology(ref)
    path = Path(ref)
    if not path.is_file():
        raise TopologyError(f"{ref!r} is neither a built-in topology nor a readable file")
    return load_topology_file(path)


def new_network_state(topology: Topology) -> NetworkState:
    """All channels free, all usage counters zero."""
    return NetworkState(topology)
