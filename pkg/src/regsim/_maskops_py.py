"""Pure-Python quorum bitmask scans (fallback for the C extension).

Server sets are bitmasks: bit i set means server index i is present.
These two scans run on every message delivery in busy runs, which is why
a compiled twin exists in _maskops_c.pyx; both must stay behaviourally
identical (tests/test_kernels.py enforces it).
"""

from __future__ import annotations

from typing import Sequence


def first_contained(masks: Sequence[int], responders: int) -> int:
    """Index of the first mask fully inside responders, or -1."""
    for i, m in enumerate(masks):
        if m & ~responders == 0:
            return i
    return -1


def view3_exists(masks: Sequence[int], current: int, maxset: int) -> bool:
    """True when some quorum other than `current` intersects it only in maxset.

    `current` may be a shrunken remainder of a quorum, so an intersection can
    be empty; the subset test is then vacuously true, which is exactly the
    conservative behaviour the iterative read analysis wants.
    """
    for m in masks:
        if m != current and (m & current) & ~maxset == 0:
            return True
    return False
