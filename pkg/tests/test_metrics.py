import itertools
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambdasim.metrics import MetricsAccumulator, erlang_b
from lambdasim.routing import Path
from lambdasim.rwa import Accepted, BlockReason, Blocked, ConnectionRequest, Lightpath, Provisioning
from lambdasim.topology import builtin_topology


def erlang_b_closed_form(c, load):
    """Exact rational evaluation of A^c/c! / sum_k A^k/k!."""
    a = Fraction(load)
    return float((a**c / factorial(c)) / sum(a**k / factorial(k) for k in range(c + 1)))


def accepted(request_id, costs):
    topo = builtin_topology("nsfnet14")
    routes = [Path.from_nodes(topo, [0, 1]), Path.from_nodes(topo, [0, 2]), Path.from_nodes(topo, [0, 7])]
    lps = tuple(Lightpath(Path(r.nodes, r.links, c), 0, (0,)) for r, c in zip(routes, costs))
    return Accepted(Provisioning(request_id, lps))


def finalize(acc):
    return acc.finalize(load=1.0, algorithm="x", W=1, F=1, g=1)


def test_erlang_b_values():
    assert erlang_b(1, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert erlang_b(2, 1.0) == pytest.approx(0.2, abs=1e-15)
    # 4/104739 from the exact rational form
    assert erlang_b(10, 2.0) == pytest.approx(4 / 104739, rel=1e-12)
    assert erlang_b(10, 2.0) == pytest.approx(3.82e-5, rel=1e-3)


@pytest.mark.parametrize("c, load", [(1, 0.3), (8, 2.0), (8, 4.0), (8, 6.0), (16, 12.5), (30, 40.0)])
def test_erlang_b_matches_closed_form(c, load):
    assert erlang_b(c, load) == pytest.approx(erlang_b_closed_form(c, load), rel=1e-12)


def test_erlang_b_large_is_stable():
    b = erlang_b(2000, 1900.0)
    assert 0 < b < 1


@pytest.mark.parametrize("c, load", [(0, 1.0), (-1, 1.0), (2, 0.0), (2, -3.0), (2.5, 1.0), (2, float("inf"))])
def test_erlang_b_rejects(c, load):
    with pytest.raises(ValueError):
        erlang_b(c, load)


@given(st.integers(1, 60), st.floats(0.01, 80))
def test_erlang_b_monotone(c, load):
    assert erlang_b(c + 1, load) < erlang_b(c, load)
    assert erlang_b(c, load * 1.1) > erlang_b(c, load)


def test_record_blocked():
    acc = MetricsAccumulator().record(Blocked(BlockReason.NO_WAVELENGTH), ConnectionRequest(0, 0, 1))
    assert (acc.offered, acc.blocked, acc.accepted) == (1, 1, 0)
    assert acc.blocked_by_reason == {"no_wavelength": 1}


def test_record_accepted_two_paths():
    acc = MetricsAccumulator().record(accepted(0, [4.0, 5.0]), ConnectionRequest(0, 0, 1, demand=2))
    assert acc.paths_used_histogram == {2: 1}
    assert acc.sum_total_cost == 9


def test_blocking_one_third():
    acc = MetricsAccumulator()
    acc.record(accepted(0, [1.0]), ConnectionRequest(0, 0, 1))
    acc.record(accepted(1, [2.0]), ConnectionRequest(1, 0, 1))
    acc.record(Blocked(BlockReason.NO_WAVELENGTH), ConnectionRequest(2, 0, 1))
    row = finalize(acc)
    assert row.blocking_probability == pytest.approx(1 / 3)
    assert row.avg_total_cost == 1.5


def test_blocking_one_tenth():
    acc = MetricsAccumulator()
    for i in range(9):
        acc.record(accepted(i, [1.0]), ConnectionRequest(i, 0, 1))
    acc.record(Blocked(BlockReason.NO_ROUTE), ConnectionRequest(9, 0, 1))
    assert finalize(acc).blocking_probability == 0.1


def test_nothing_accepted():
    acc = MetricsAccumulator().record(Blocked(BlockReason.NO_ROUTE), ConnectionRequest(0, 0, 1))
    row = finalize(acc)
    assert row.avg_total_cost == 0 and row.blocking_probability == 1.0
    assert row.multipath_fraction == 0 and row.avg_paths_per_request == 0


def test_bandwidth_blocking():
    acc = MetricsAccumulator()
    acc.record(Blocked(BlockReason.INSUFFICIENT_CAPACITY), ConnectionRequest(0, 0, 1, demand=3))
    acc.record(accepted(1, [1.0]), ConnectionRequest(1, 0, 1, demand=1))
    row = finalize(acc)
    assert row.bandwidth_blocking_probability == 0.75
    assert row.blocking_probability == 0.5


def test_finalize_empty():
    with pytest.raises(ValueError):
        finalize(MetricsAccumulator())


def test_multipath_fraction():
    acc = MetricsAccumulator()
    acc.record(accepted(0, [1.0, 2.0]), ConnectionRequest(0, 0, 1, demand=2))
    acc.record(accepted(1, [1.0]), ConnectionRequest(1, 0, 1))
    acc.record(accepted(2, [1.0, 1.0, 1.0]), ConnectionRequest(2, 0, 1, demand=3))
    acc.record(accepted(3, [1.0]), ConnectionRequest(3, 0, 1))
    row = finalize(acc)
    assert row.multipath_fraction == 0.5
    assert row.avg_paths_per_request == 7 / 4
    assert sum(acc.paths_used_histogram.values()) == acc.accepted


def test_record_order_does_not_matter():
    events = [
        (accepted(0, [3.0]), ConnectionRequest(0, 0, 1)),
        (Blocked(BlockReason.NO_WAVELENGTH), ConnectionRequest(1, 0, 1, demand=2)),
        (accepted(2, [1.0, 2.0]), ConnectionRequest(2, 0, 1, demand=2)),
        (Blocked(BlockReason.NO_ROUTE), ConnectionRequest(3, 0, 1)),
    ]
    rows = set()
    for perm in itertools.permutations(events):
        acc = MetricsAccumulator()
        for decision, request in perm:
            acc.record(decision, request)
        rows.add(finalize(acc))
    assert len(rows) == 1


def test_time_weighted_utilization():
    acc = MetricsAccumulator(wavelengths=2)
    acc.record(Blocked(BlockReason.NO_ROUTE), ConnectionRequest(0, 0, 1))
    acc.track(0.0, 0, 2)  # two channels on w0 from t=0
    acc.track(1.0, 1, 1)  # one channel on w1 from t=1
    acc.track(3.0, 0, -2)
    acc.close_window(4.0)
    assert acc.occupancy_time == [6.0, 3.0]
    row = acc.finalize(1.0, "x", 2, 1, 1, total_channels=4)
    assert row.wavelength_utilization == pytest.approx(9 / 16)


def test_window_discards_warmup():
    acc = MetricsAccumulator(wavelengths=1)
    acc.record(Blocked(BlockReason.NO_ROUTE), ConnectionRequest(0, 0, 1))
    acc.track(0.0, 0, 1)
    acc.open_window(2.0)
    acc.close_window(4.0)
    assert acc.occupancy_time == [2.0]
