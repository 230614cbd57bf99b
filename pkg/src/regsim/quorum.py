"""Quorum systems over small server universes.

Two constructions are provided: majority quorums (all subsets of size
floor(n/2)+1 over servers 1..n, in lexicographic order) and matrix quorums
(servers 0..rows*cols-1 laid out row-major, one quorum per (row, column)
pair, the union of that row and column, rows enumerated before columns).

Member ids are whatever the construction used; the simulator maps the i-th
smallest universe id to server process index i.  All hot-path operations
work on bitmasks over those indices.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from regsim import _maskops_py, kernels


@dataclass
class QuorumSystem:
    universe: frozenset[int]
    quorums: list[frozenset[int]]
    # Derived mask state, filled in __post_init__.
    members: list[int] = field(init=False, repr=False)
    masks: list[int] = field(init=False, repr=False)
    _bit_of: dict[int, int] = field(init=False, repr=False)
    _masks_seq: Sequence[int] = field(init=False, repr=False)
    _fc = None
    _v3 = None

    def __post_init__(self) -> None:
        self.members = sorted(self.universe)
        self._bit_of = {m: i for i, m in enumerate(self.members)}
        self.masks = [self.mask_of(q) for q in self.quorums]
        if len(self.members) <= 64 and kernels.BACKEND == "c":
            self._masks_seq = array("Q", self.masks)
            self._fc = kernels.first_contained
            self._v3 = kernels.view3_exists
        else:
            self._masks_seq = self.masks
            self._fc = _maskops_py.first_contained
            self._v3 = _maskops_py.view3_exists

    @property
    def n(self) -> int:
        return len(self.members)

    def mask_of(self, ids: Iterable[int]) -> int:
        m = 0
        for s in ids:
            m |= 1 << self._bit_of[s]
        return m

    def ids_of(self, mask: int) -> frozenset[int]:
        return frozenset(self.members[i] for i in range(self.n) if mask >> i & 1)

    def validate(self) -> None:
        """Raise ValueError unless every pair of quorums intersects."""
        if not self.quorums:
            raise ValueError("quorum system has no quorums")
        for i, q in enumerate(self.quorums):
            if not q:
                raise ValueError("quorum %d is empty" % i)
            if not q <= self.universe:
                raise ValueError("quorum %d not within the universe" % i)
        for i in range(len(self.masks)):
            for j in range(i + 1, len(self.masks)):
                if self.masks[i] & self.masks[j] == 0:
                    raise ValueError(
                        "quorums %d and %d are disjoint: %s, %s"
                        % (i, j, sorted(self.quorums[i]), sorted(self.quorums[j]))
                    )

    # Mask-level scans used by the protocol state machines.

    def first_contained_mask(self, responders: int) -> int:
        """Index of the first quorum fully inside the responder mask, or -1."""
        return self._fc(self._masks_seq, responders)

    def view3_mask(self, current: int, maxset: int) -> bool:
        return self._v3(self._masks_seq, current, maxset)

    def relay_mask(self, bit: int) -> int:
        """Mask of every server sharing a quorum with server bit `bit`."""
        m = 0
        for qm in self.masks:
            if qm >> bit & 1:
                m |= qm
        return m


def first_contained_quorum(qs: QuorumSystem, responders: Iterable[int]) -> Optional[int]:
    """First quorum (enumeration order) whose members all responded, if any."""
    idx = qs.first_contained_mask(qs.mask_of(responders))
    return None if idx < 0 else idx


def relay_destinations(qs: QuorumSystem, s: int) -> frozenset[int]:
    """Union of the quorums containing s; always includes s itself."""
    if s not in qs.universe:
        raise ValueError("server %r not in universe" % (s,))
    return qs.ids_of(qs.relay_mask(qs._bit_of[s]))


def build_majority(n: int) -> QuorumSystem:
    """Majority quorums over servers 1..n, e.g. n=3 -> {1,2},{1,3},{2,3}."""
    if n < 1:
        raise ValueError("need at least one server")
    size = n // 2 + 1
    universe = frozenset(range(1, n + 1))
    quorums = [frozenset(c) for c in combinations(range(1, n + 1), size)]
    qs = QuorumSystem(universe, quorums)
    qs.validate()
    return qs


def build_matrix(rows: int, cols: int) -> QuorumSystem:
    """Grid quorums: quorum (r, c) is row r united with column c."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    universe = frozenset(range(rows * cols))
    quorums = []
    for r in range(rows):
        row = frozenset(range(r * cols, (r + 1) * cols))
        for c in range(cols):
            col = frozenset(i * cols + c for i in range(rows))
            quorums.append(row | col)
    qs = QuorumSystem(universe, quorums)
    qs.validate()
    return qs
