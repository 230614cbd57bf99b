"""Query/write-back register baseline.

Reads always take two round trips: query every server for its pair, pick
the quorum maximum, write it back to every server and wait for a second
acknowledgement quorum (4 exchanges, no fast path).  The write-back reuses
the relay message kind with the reader as sender; read_op advances once
per phase so stale replies filter out naturally.  Writes are the plain
timestamp broadcast in single-writer mode and the two-phase discover/put
in multi-writer mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from regsim.core import Message, MessageKind, ProcessId, Role, Tag
from regsim.protocols import base
from regsim.protocols.base import Deliver, Event, Invoke, Response, StepOutput, bits, broadcast
from regsim.quorum import QuorumSystem


@dataclass
class QueryReaderState:
    pid: ProcessId
    read_op: int = 0
    phase: str = "idle"  # idle | query | writeback
    acks: dict[int, Message] = field(default_factory=dict)
    ack_mask: int = 0
    chosen_tag: Optional[Tag] = None
    chosen_value: Optional[bytes] = None


def query_reader_step(state: QueryReaderState, event: Event, qs: QuorumSystem) -> StepOutput:
    out = StepOutput()
    if isinstance(event, Invoke):
        assert state.phase == "idle" and event.value is None
        state.read_op += 1
        state.phase = "query"
        state.acks = {}
        state.ack_mask = 0
        broadcast(out, qs, Message(MessageKind.READ_REQUEST, state.pid, state.pid, state.read_op))
        return out
    msg = event.msg
    if msg.op_seq < state.read_op:
        out.stale = True
        return out
    if state.phase == "idle" or msg.kind is not MessageKind.READ_ACK:
        return out
    bit = msg.sender.index
    state.acks[bit] = msg
    state.ack_mask |= 1 << bit
    qi = qs.first_contained_mask(state.ack_mask)
    if qi < 0:
        return out
    if state.phase == "query":
        best = max((state.acks[b] for b in bits(qs.masks[qi])), key=lambda m: m.tag)
        state.chosen_tag = best.tag
        state.chosen_value = best.value
        state.read_op += 1
        state.phase = "writeback"
        state.acks = {}
        state.ack_mask = 0
        broadcast(
            out,
            qs,
            Message(MessageKind.READ_RELAY, state.pid, state.pid, state.read_op, best.tag, best.value),
        )
    else:
        state.phase = "idle"
        out.response = Response(state.chosen_value, state.chosen_tag, 4)
    return out


def make_reader(pid: ProcessId, qs: QuorumSystem) -> QueryReaderState:
    return QueryReaderState(pid)


def make_writer(pid: ProcessId, qs: QuorumSystem, mw: bool):
    return base.MWWriterState(pid) if mw else base.SWMRWriterState(pid)


def make_server(pid: ProcessId, qs: QuorumSystem, mw: bool) -> base.PlainServerState:
    return base.PlainServerState(pid, mw)


def baseline_abd_step(role: Role, state, event: Event, qs: QuorumSystem, variant: str = "swmr") -> StepOutput:
    if role is Role.READER:
        return query_reader_step(state, event, qs)
    if role is Role.WRITER:
        if variant == "mwmr":
            return base.mw_writer_step(state, event, qs)
        return base.swmr_writer_step(state, event, qs)
    return base.plain_server_step(state, event, qs)
