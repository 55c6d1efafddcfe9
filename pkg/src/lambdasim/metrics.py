"""Run statistics, result rows and the Erlang-B reference formula."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field

from lambdasim.rwa import Accepted, BlockReason, Blocked, ConnectionRequest, Decision

__all__ = ["MetricsAccumulator", "ResultRow", "erlang_b"]


def erlang_b(channels: int, load: float) -> float:
    """Blocking probability of an M/M/c/c loss system.

    Uses the recurrence B(0) = 1, B(n) = A*B(n-1) / (n + A*B(n-1)),
    which stays stable for large ``channels``.
    """
    if isinstance(channels, bool) or not isinstance(channels, int) or channels < 1:
        raise ValueError(f"channels must be a positive integer, got {channels!r}")
    if not (isinstance(load, (int, float)) and math.isfinite(load) and load > 0):
        raise ValueError(f"load must be a positive finite number, got {load!r}")
    b = 1.0
    for n in range(1, channels + 1):
        b = load * b / (n + load * b)
    return b


@dataclass(frozen=True)
class ResultRow:
    load: float
    algorithm: str
    W: int
    F: int
    g: int
    blocking_probability: float
    bandwidth_blocking_probability: float
    avg_total_cost: float
    multipath_fraction: float
    avg_paths_per_request: float
    wavelength_utilization: float
    offered: int = 0
    blocked: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class MetricsAccumulator:
    """Counters for one simulated load point.

    Occupancy is integrated over time per wavelength; call :meth:`track`
    whenever a lightpath is set up or torn down and :meth:`open_window` /
    :meth:`close_window` to bound the measurement interval.
    """

    wavelengths: int = 1
    offered: int = 0
    accepted: int = 0
    blocked: int = 0
    offered_channels: int = 0
    blocked_channels: int = 0
    sum_total_cost: float = 0.0
    sum_paths: int = 0
    paths_used_histogram: Counter = field(default_factory=Counter)
    blocked_by_reason: Counter = field(default_factory=Counter)
    occupancy_time: list[float] = field(default_factory=list)
    window_start: float = 0.0
    window_end: float | None = None
    _occupied: list[int] = field(default_factory=list, repr=False)
    _last_change: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not self.occupancy_time:
            self.occupancy_time = [0.0] * self.wavelengths
        self._occupied = [0] * self.wavelengths
        self._last_change = [self.window_start] * self.wavelengths

    def record(self, decision: Decision, request: ConnectionRequest) -> MetricsAccumulator:
        self.offered += 1
        self.offered_channels += request.demand
        if isinstance(decision, Accepted):
            prov = decision.provisioning
            self.accepted += 1
            self.sum_total_cost += prov.total_cost
            self.sum_paths += prov.paths_used
            self.paths_used_histogram[prov.paths_used] += 1
        elif isinstance(decision, Blocked):
            self.blocked += 1
            self.blocked_channels += request.demand
            self.blocked_by_reason[BlockReason(decision.reason).value] += 1
        else:
            raise TypeError(f"not a decision: {decision!r}")
        return self

    def track(self, time: float, wavelength: int, delta: int) -> None:
        """Occupied channel count on ``wavelength`` changes by ``delta`` at ``time``."""
        start = max(self._last_change[wavelength], self.window_start)
        if time > start:
            self.occupancy_time[wavelength] += self._occupied[wavelength] * (time - start)
        self._last_change[wavelength] = time
        self._occupied[wavelength] += delta

    def open_window(self, time: float) -> None:
        """Discard everything integrated so far; measure from ``time`` on."""
        self.window_start = time
        self.occupancy_time = [0.0] * self.wavelengths

    def close_window(self, time: float) -> None:
        for w in range(self.wavelengths):
            start = max(self._last_change[w], self.window_start)
            if time > start:
                self.occupancy_time[w] += self._occupied[w] * (time - start)
            self._last_change[w] = time
        self.window_end = time

    def finalize(
        self,
        load: float,
        algorithm: str,
        W: int,
        F: int,
        g: int,
        total_channels: int | None = None,
    ) -> ResultRow:
        if self.offered == 0:
            raise ValueError("cannot finalize a run with no offered requests")
        accepted = self.accepted
        multipath = sum(count for paths, count in self.paths_used_histogram.items() if paths >= 2)
        utilization = 0.0
        if total_channels and self.window_end is not None and self.window_end > self.window_start:
            duration = self.window_end - self.window_start
            utilization = min(1.0, sum(self.occupancy_time) / (duration * total_channels))
        return ResultRow(
            load=load,
            algorithm=algorithm,
            W=W,
            F=F,
            g=g,
            blocking_probability=self.blocked / self.offered,
            bandwidth_blocking_probability=self.blocked_channels / self.offered_channels,
            avg_total_cost=self.sum_total_cost / accepted if accepted else 0.0,
            multipath_fraction=multipath / accepted if accepted else 0.0,
            avg_paths_per_request=self.sum_paths / accepted if accepted else 0.0,
            wavelength_utilization=utilization,
            offered=self.offered,
            blocked=self.blocked,
        )
