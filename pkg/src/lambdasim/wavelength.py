"""Wavelength availability along routes and the R / FF / MU / LU assignment policies.

A wavelength mask is a plain ``int``: bit ``w`` set means wavelength ``w``
is usable.  ``parse_mask``/``format_mask`` convert to the string notation
used in tests and logs, where character ``i`` is bit ``i``.
"""

from __future__ import annotations

import enum
import random
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from lambdasim.routing import Path
    from lambdasim.state import NetworkState

__all__ = [
    "Policy",
    "assign_wavelength",
    "format_mask",
    "parse_mask",
    "path_availability",
    "update_usage",
]


class Policy(str, enum.Enum):
    FIRST_FIT = "ff"
    RANDOM = "rand"
    MOST_USED = "mu"
    LEAST_USED = "lu"


def parse_mask(text: str) -> int:
    mask = 0
    for i, ch in enumerate(text):
        if ch == "1":
            mask |= 1 << i
        elif ch != "0":
            raise ValueError(f"mask string may only contain 0/1, got {text!r}")
    return mask


def format_mask(mask: int, width: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(width))


def path_availability(state: NetworkState, path: Path) -> int:
    """Wavelengths free on every link of ``path`` (some fiber each)."""
    mask = state.full_mask
    link_free = state.link_free
    for link in path.links:
        mask &= link_free[link]
        if not mask:
            break
    return mask


def _set_bits(mask: int) -> list[int]:
    bits = []
    while mask:
        low = mask & -mask
        bits.append(low.bit_length() - 1)
        mask ^= low
    return bits


def assign_wavelength(
    policy: Policy,
    mask: int,
    usage: Sequence[int],
    rng: random.Random | None = None,
) -> int | None:
    """Pick a wavelength from ``mask`` or return None when it is empty.

    Only ``Policy.RANDOM`` touches ``rng``, and it draws exactly once.
    MU/LU ties go to the lowest index.
    """
    if not mask:
        return None
    if policy is Policy.FIRST_FIT:
        return (mask & -mask).bit_length() - 1
    if policy is Policy.RANDOM:
        if rng is None:
            raise ValueError("random wavelength assignment needs an rng")
        bits = _set_bits(mask)
        return bits[int(rng.random() * len(bits))]
    bits = _set_bits(mask)
    if policy is Policy.MOST_USED:
        return max(bits, key=lambda w: (usage[w], -w))
    if policy is Policy.LEAST_USED:
        return min(bits, key=lambda w: (usage[w], w))
    raise ValueError(f"unknown policy {policy!r}")


def update_usage(usage: list[int], wavelength: int, delta: int) -> list[int]:
    """Adjust one counter in place and return ``usage``; refuses to go below zero."""
    value = usage[wavelength] + delta
    if value < 0:
        raise ValueError(f"usage counter for wavelength {wavelength} would underflow ({usage[wavelength]} {delta:+d})")
    usage[wavelength] = value
    return usage
