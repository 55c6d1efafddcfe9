"""Mutable channel occupancy for one simulation run.

Each ``(link, fiber)`` keeps an integer bitmask of its free wavelengths.
Two derived views are maintained incrementally because the admission
code reads them on every request:

* ``link_free[l]``: OR over the fibers of link ``l`` (wavelengths usable on the link);
* ``layer_links[w]``: bitmask over link ids on which wavelength ``w`` is usable.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from lambdasim.wavelength import update_usage

if TYPE_CHECKING:
    from lambdasim.topology import Topology

__all__ = ["ChannelError", "NetworkState"]


class ChannelError(RuntimeError):
    """Occupying a busy channel or freeing one that is not held by the caller."""


class NetworkState:
    def __init__(self, topology: Topology) -> None:
        self.topology = topology
        self.wavelengths = W = topology.wavelengths
        self.full_mask = (1 << W) - 1
        self.free: list[list[int]] = [[self.full_mask] * link.fibers for link in topology.links]
        self.link_free: list[int] = [self.full_mask] * len(topology.links)
        all_links = (1 << len(topology.links)) - 1
        self.layer_links: list[int] = [all_links] * W
        self.usage: list[int] = [0] * W
        self.owner: dict[tuple[int, int, int], int] = {}
        # adaptive-routing memo; depends only on the topology, so copies share it
        self.route_cache: dict = {}

    def copy(self) -> NetworkState:
        other = NetworkState.__new__(NetworkState)
        other.topology = self.topology
        other.wavelengths = self.wavelengths
        other.full_mask = self.full_mask
        other.free = [list(fibers) for fibers in self.free]
        other.link_free = list(self.link_free)
        other.layer_links = list(self.layer_links)
        other.usage = list(self.usage)
        other.owner = dict(self.owner)
        other.route_cache = self.route_cache
        return other

    def snapshot(self) -> tuple:
        """Hashable image of the occupancy, for bit-identity checks."""
        return (
            tuple(tuple(f) for f in self.free),
            tuple(self.usage),
            tuple(sorted(self.owner.items())),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkState):
            return NotImplemented
        return self.topology == other.topology and self.snapshot() == other.snapshot()

    __hash__ = None  # type: ignore[assignment]

    def total_occupied(self) -> int:
        return len(self.owner)

    def is_free(self, link: int, fiber: int, wavelength: int) -> bool:
        return bool(self.free[link][fiber] >> wavelength & 1)

    def first_free_fiber(self, link: int, wavelength: int) -> int | None:
        bit = 1 << wavelength
        for fiber, mask in enumerate(self.free[link]):
            if mask & bit:
                return fiber
        return None

    def _refresh_link(self, link: int) -> None:
        mask = 0
        for fiber_mask in self.free[link]:
            mask |= fiber_mask
        changed = mask ^ self.link_free[link]
        if changed:
            self.link_free[link] = mask
            link_bit = 1 << link
            while changed:
                low = changed & -changed
                w = low.bit_length() - 1
                if mask & low:
                    self.layer_links[w] |= link_bit
                else:
                    self.layer_links[w] &= ~link_bit
                changed ^= low

    def occupy(self, link: int, fiber: int, wavelength: int, owner: int) -> None:
        bit = 1 << wavelength
        if not self.free[link][fiber] & bit:
            raise ChannelError(f"channel (link {link}, fiber {fiber}, w {wavelength}) is already occupied")
        self.free[link][fiber] &= ~bit
        self.owner[(link, fiber, wavelength)] = owner
        update_usage(self.usage, wavelength, 1)
        self._refresh_link(link)

    def vacate(self, link: int, fiber: int, wavelength: int, owner: int) -> None:
        key = (link, fiber, wavelength)
        holder = self.owner.get(key)
        if holder != owner:
            what = "free" if holder is None else f"held by request {holder}"
            raise ChannelError(f"channel (link {link}, fiber {fiber}, w {wavelength}) is {what}, not request {owner}")
        del self.owner[key]
        self.free[link][fiber] |= 1 << wavelength
        update_usage(self.usage, wavelength, -1)
        self._refresh_link(link)
