"""Atomicity verification for read/write register histories.

Two independent checkers with deliberately different foundations:

check_atomicity_tagged orders operations by their tags and scans every
real-time-ordered pair for an inversion.  It is linear-ish in history
size and is the production check.

brute_force_linearizable searches exhaustively for a total order of the
operations that extends real-time precedence and is a legal sequential
register history over values.  It is exponential and only accepts small
histories, but it knows nothing about tags, which makes it a genuinely
independent oracle.

The two notions coincide whenever write order is pinned down, i.e. writes
are sequential or their tags respect real time, and values identify
writes uniquely.  With concurrent identically-valued or re-orderable
writes the value-based search is more permissive by construction: it may
reorder concurrent writes, while tags freeze one order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from regsim.core import INITIAL_TAG, INITIAL_VALUE, History, OperationRecord, ProcessId
from regsim.netsim import Trace

A1 = "A1"
A2 = "A2"
A3 = "A3"

BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violated: Optional[str] = None
    witness: tuple[int, ...] = ()
    detail: str = ""

    def __post_init__(self) -> None:
        assert self.ok == (self.violated is None)


def well_formedness_errors(ops: Iterable[OperationRecord]) -> list[str]:
    """Overlapping operations of one process: clients must be sequential."""
    by_process: dict[ProcessId, list[OperationRecord]] = {}
    for op in ops:
        by_process.setdefault(op.process, []).append(op)
    errors = []
    for pid, group in sorted(by_process.items()):
        group.sort(key=lambda o: (o.invoked_at, o.op_id))
        for prev, cur in zip(group, group[1:]):
            if prev.responded_at is None or prev.responded_at > cur.invoked_at:
                errors.append(
                    "process %s: operations %d and %d overlap" % (pid, prev.op_id, cur.op_id)
                )
    return errors


def extract_history(trace: Trace) -> History:
    return History(ops=trace.operations(), initial_tag=INITIAL_TAG)


def _require_well_formed(ops: Iterable[OperationRecord]) -> None:
    errors = well_formedness_errors(ops)
    if errors:
        raise ValueError("malformed history: " + "; ".join(errors))


def check_atomicity_tagged(history: History, strict: bool = False) -> Verdict:
    """Pairwise tag check of the three atomicity conditions.

    A1: no real-time-ordered pair is inverted by the tag order, where a
        write is ordered after anything with a tag >= its own, and reads
        with equal tags stay mutually unordered.
    A2: write tags are unique.
    A3: every read returns some write's tag (or the initial tag), and no
        read returns a tag smaller than that of a write that completed
        before the read began.

    Incomplete operations stay out of the pair scan; the decided tag of an
    unfinished write still makes that tag legal for readers (servers may
    have adopted it even though the writer never got its acks).  With
    strict=True, unfinished writes that decided a tag are instead treated
    as completing at time infinity and join the pair scan.
    """
    _require_well_formed(history.ops)
    completed = [op for op in history.ops if op.responded_at is not None]
    for op in completed:
        if op.tag is None:
            raise ValueError("completed operation %d has no tag" % op.op_id)
    pending_tagged = [
        op for op in history.ops
        if op.responded_at is None and op.kind == "write" and op.tag is not None
    ]
    scan = completed + (pending_tagged if strict else [])
    scan.sort(key=lambda o: (o.invoked_at, o.op_id))
    responded = {
        op.op_id: op.responded_at if op.responded_at is not None else math.inf for op in scan
    }

    ordered_pairs = [
        (a, b)
        for i, a in enumerate(scan)
        for b in scan[i + 1:]
        if responded[a.op_id] < b.invoked_at
    ]

    for a, b in ordered_pairs:
        inverted = (
            (a.kind == "read" and b.kind == "read" and b.tag < a.tag)
            or (a.kind == "read" and b.kind == "write" and b.tag <= a.tag)
            or (a.kind == "write" and b.kind == "write" and b.tag < a.tag)
        )
        if inverted:
            return Verdict(
                False, A1, (a.op_id, b.op_id),
                "%s %d (tag %s) precedes %s %d (tag %s) in real time but not in tag order"
                % (a.kind, a.op_id, a.tag, b.kind, b.op_id, b.tag),
            )

    writes = [op for op in scan if op.kind == "write"]
    seen: dict = {}
    for op in sorted(writes, key=lambda o: (o.invoked_at, o.op_id)):
        other = seen.get(op.tag)
        if other is not None:
            return Verdict(
                False, A2, (other, op.op_id),
                "writes %d and %d share tag %s" % (other, op.op_id, op.tag),
            )
        seen[op.tag] = op.op_id

    valid_tags = {op.tag for op in history.ops if op.kind == "write" and op.tag is not None}
    valid_tags.add(history.initial_tag)
    for op in scan:
        if op.kind == "read" and op.tag not in valid_tags:
            return Verdict(
                False, A3, (op.op_id,),
                "read %d returned tag %s, which no write produced" % (op.op_id, op.tag),
            )
    for a, b in ordered_pairs:
        if a.kind == "write" and b.kind == "read" and b.tag < a.tag:
            return Verdict(
                False, A3, (a.op_id, b.op_id),
                "read %d returned tag %s although write %d (tag %s) had already completed"
                % (b.op_id, b.tag, a.op_id, a.tag),
            )
    return Verdict(True)


def brute_force_linearizable(
    history: History,
    initial_value: bytes = INITIAL_VALUE,
    limit: int = BRUTE_FORCE_LIMIT,
) -> bool:
    """Exhaustive search for a legal sequential ordering, by value only.

    Completed operations must all appear in the order; unfinished writes
    may be placed anywhere their invocation time allows or dropped
    entirely (their effect may or may not have happened).  Unfinished
    reads are ignored.  A read is legal when it returns the value of the
    latest write placed before it, or initial_value if there is none.
    """
    _require_well_formed(history.ops)
    completed = [op for op in history.ops if op.responded_at is not None]
    if len(completed) > limit:
        raise ValueError(
            "history has %d completed operations; exhaustive search is capped at %d"
            % (len(completed), limit)
        )
    pending_writes = [
        op for op in history.ops if op.responded_at is None and op.kind == "write"
    ]
    ops = completed + pending_writes
    inv = [op.invoked_at for op in ops]
    resp = [op.responded_at if op.responded_at is not None else math.inf for op in ops]
    required = frozenset(range(len(completed)))
    memo: dict[tuple[frozenset, bytes], bool] = {}

    def solve(remaining: frozenset, value: bytes) -> bool:
        if not (remaining & required):
            return True  # only droppable unfinished writes left
        key = (remaining, value)
        cached = memo.get(key)
        if cached is not None:
            return cached
        ok = False
        for i in sorted(remaining):
            # i can go next only if nothing still unplaced finished before
            # i was invoked.
            if any(j != i and resp[j] < inv[i] for j in remaining):
                continue
            op = ops[i]
            if op.kind == "read":
                if op.value != value:
                    continue
                ok = solve(remaining - {i}, value)
            else:
                ok = solve(remaining - {i}, op.value)
            if ok:
                break
        memo[key] = ok
        return ok

    return solve(frozenset(range(len(ops))), initial_value)


def adoption_violations(trace: Trace) -> list[str]:
    """Server-side tag monotonicity: adopted tags never go backwards."""
    latest: dict = {}
    errors = []
    from regsim.core import Tag

    for rec in trace.records:
        if rec[0] != "tag":
            continue
        _, t, pid, ts, wid = rec
        tag = Tag(ts, wid)
        prev = latest.get(pid)
        if prev is not None and tag < prev:
            errors.append("server %s adopted %s after %s at t=%r" % (pid, tag, prev, t))
        latest[pid] = tag
    return errors


def realtime_tag_violations(history: History) -> list[str]:
    """Pairwise monotonicity facts implied by atomicity, reported separately.

    For real-time-ordered completed pairs: a read after a write returns a
    tag >= the write's; sequential writes have strictly increasing tags;
    a read after a read returns a tag >= the earlier read's.
    """
    _require_well_formed(history.ops)
    completed = sorted(
        (op for op in history.ops if op.responded_at is not None),
        key=lambda o: (o.invoked_at, o.op_id),
    )
    errors = []
    for i, a in enumerate(completed):
        for b in completed[i + 1:]:
            if a.responded_at >= b.invoked_at:
                continue
            if a.kind == "write" and b.kind == "read" and not b.tag >= a.tag:
                errors.append("read %d after write %d: %s < %s" % (b.op_id, a.op_id, b.tag, a.tag))
            elif a.kind == "write" and b.kind == "write" and not b.tag > a.tag:
                errors.append("write %d after write %d: %s <= %s" % (b.op_id, a.op_id, b.tag, a.tag))
            elif a.kind == "read" and b.kind == "read" and not b.tag >= a.tag:
                errors.append("read %d after read %d: %s < %s" % (b.op_id, a.op_id, b.tag, a.tag))
    return errors
