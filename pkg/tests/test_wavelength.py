import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_topology
from lambdasim.routing import Path
from lambdasim.topology import builtin_topology, new_network_state
from lambdasim.wavelength import (
    Policy,
    assign_wavelength,
    format_mask,
    parse_mask,
    path_availability,
    update_usage,
)


def test_mask_notation():
    assert parse_mask("0101") == 0b1010
    assert format_mask(0b1010, 4) == "0101"
    with pytest.raises(ValueError):
        parse_mask("012")


def test_empty_state_all_available(nsfnet):
    topo = nsfnet.with_capacity(wavelengths=4)
    state = new_network_state(topo)
    path = Path.from_nodes(topo, [0, 1, 3, 4])
    assert format_mask(path_availability(state, path), 4) == "1111"


def test_line2_w0_occupied(line2):
    state = new_network_state(line2)
    state.occupy(0, 0, 0, owner=7)
    path = Path.from_nodes(line2, [0, 1])
    assert format_mask(path_availability(state, path), 2) == "01"


def test_continuity_breaks():
    topo = make_topology([(0, 1), (1, 2)], wavelengths=2)
    state = new_network_state(topo)
    state.occupy(0, 0, 1, owner=1)  # link A keeps {0}
    state.occupy(1, 0, 0, owner=2)  # link B keeps {1}
    assert path_availability(state, Path.from_nodes(topo, [0, 1, 2])) == 0


def test_multifiber_link_mask_is_union():
    topo = make_topology([(0, 1)], wavelengths=2, fibers=2)
    state = new_network_state(topo)
    state.occupy(0, 0, 0, owner=1)
    assert format_mask(path_availability(state, Path.from_nodes(topo, [0, 1])), 2) == "11"
    state.occupy(0, 1, 0, owner=2)
    assert format_mask(path_availability(state, Path.from_nodes(topo, [0, 1])), 2) == "01"


def bits(*indices):
    return sum(1 << i for i in indices)


def test_first_fit():
    assert assign_wavelength(Policy.FIRST_FIT, bits(0, 2), [0] * 4) == 0
    assert assign_wavelength(Policy.FIRST_FIT, bits(1, 3), [0] * 4) == 1


def test_most_used_restricted_to_mask():
    # w2 has the highest count but is not available
    assert assign_wavelength(Policy.MOST_USED, bits(0, 1), [5, 2, 9]) == 0
    assert assign_wavelength(Policy.MOST_USED, bits(1, 2), [5, 2, 9]) == 2


def test_least_used_tie_goes_low():
    assert assign_wavelength(Policy.LEAST_USED, parse_mask("11"), [3, 3]) == 0
    assert assign_wavelength(Policy.MOST_USED, parse_mask("11"), [3, 3]) == 0
    assert assign_wavelength(Policy.LEAST_USED, parse_mask("111"), [4, 1, 2]) == 1


@pytest.mark.parametrize("policy", list(Policy))
def test_empty_mask(policy):
    assert assign_wavelength(policy, 0, [0, 0], random.Random(0)) is None


def test_random_uses_one_draw():
    rng, twin = random.Random(5), random.Random(5)
    w = assign_wavelength(Policy.RANDOM, parse_mask("0110"), [0] * 4, rng)
    twin.random()
    assert rng.random() == twin.random()
    assert w in (1, 2)


def test_random_is_roughly_uniform():
    rng = random.Random(1)
    counts = [0] * 4
    for _ in range(8000):
        counts[assign_wavelength(Policy.RANDOM, parse_mask("1011"), [0] * 4, rng)] += 1
    assert counts[1] == 0
    for w in (0, 2, 3):
        assert abs(counts[w] - 8000 / 3) < 200


@pytest.mark.parametrize("policy", [Policy.FIRST_FIT, Policy.MOST_USED, Policy.LEAST_USED])
def test_deterministic_policies_leave_rng_alone(policy):
    rng = random.Random(3)
    before = rng.getstate()
    assign_wavelength(policy, 0b1101, [1, 2, 3, 4], rng)
    assert rng.getstate() == before


@given(
    st.sampled_from(list(Policy)),
    st.integers(1, 2**12 - 1),
    st.lists(st.integers(0, 50), min_size=12, max_size=12),
    st.integers(0, 1000),
)
def test_result_is_in_mask(policy, mask, usage, seed):
    w = assign_wavelength(policy, mask, usage, random.Random(seed))
    assert mask >> w & 1


def test_update_usage():
    assert update_usage([0, 0], 1, 2) == [0, 2]
    assert update_usage([0, 2], 1, -2) == [0, 0]
    usage = [0, 0]
    with pytest.raises(ValueError, match="underflow"):
        update_usage(usage, 0, -1)
    assert usage == [0, 0]


def test_single_link_path_equals_link_mask(nsfnet):
    rng = random.Random(2)
    state = new_network_state(nsfnet)
    for link in range(len(nsfnet.links)):
        for w in range(nsfnet.wavelengths):
            if rng.random() < 0.5:
                state.occupy(link, 0, w, owner=0)
    for link in nsfnet.links:
        path = Path.from_nodes(nsfnet, [link.a, link.b])
        assert path_availability(state, path) == state.free[link.id][0]


def test_extending_path_never_adds_bits(nsfnet):
    rng = random.Random(4)
    state = new_network_state(nsfnet)
    for link in range(len(nsfnet.links)):
        for w in range(nsfnet.wavelengths):
            if rng.random() < 0.3:
                state.occupy(link, 0, w, owner=0)
    nodes = [0, 1, 3, 4, 6, 7, 8]
    masks = [path_availability(state, Path.from_nodes(nsfnet, nodes[: i + 1])) for i in range(1, len(nodes))]
    for shorter, longer in zip(masks, masks[1:]):
        assert longer & ~shorter == 0
