"""Shared machinery for the register protocol state machines.

Every protocol is the triple (reader, writer, server) of step functions
with signature step(state, event, qs) -> StepOutput.  States are plain
dataclasses mutated in place; a step is deterministic, so replaying the
same event against a copy of the state reproduces the same output.

Invoke starts an operation at a client; Deliver hands a node one message.
A client receiving a message whose op_seq is behind its own counter marks
the output stale (the simulator counts those drops); messages for the
current operation arriving after the response are ignored silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from regsim.core import (
    INITIAL_TAG,
    INITIAL_VALUE,
    Message,
    MessageKind,
    ProcessId,
    Tag,
    server,
)
from regsim.quorum import QuorumSystem


@dataclass(frozen=True)
class Invoke:
    value: Optional[bytes] = None  # payload for writes, None for reads


@dataclass(frozen=True)
class Deliver:
    msg: Message


Event = Union[Invoke, Deliver]


@dataclass(frozen=True)
class Response:
    value: bytes
    tag: Tag
    exchanges: int


@dataclass
class StepOutput:
    sends: list[tuple[ProcessId, Message]] = field(default_factory=list)
    response: Optional[Response] = None
    stale: bool = False
    notes: list[tuple] = field(default_factory=list)


def bits(mask: int) -> Iterator[int]:
    """Set bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def broadcast(out: StepOutput, qs: QuorumSystem, msg: Message) -> None:
    out.sends.extend((server(i), msg) for i in range(qs.n))


# --- writers ---------------------------------------------------------------


@dataclass
class SWMRWriterState:
    """Single writer: the timestamp itself sequences its operations."""

    pid: ProcessId
    ts: int = 0
    value: bytes = INITIAL_VALUE
    ack_mask: int = 0
    pending: bool = False


def swmr_writer_step(state: SWMRWriterState, event: Event, qs: QuorumSystem) -> StepOutput:
    out = StepOutput()
    if isinstance(event, Invoke):
        assert not state.pending and event.value is not None
        state.ts += 1
        state.value = event.value
        state.ack_mask = 0
        state.pending = True
        tag = Tag(state.ts, 0)
        out.notes.append(("wtag", tag))
        broadcast(out, qs, Message(MessageKind.WRITE_REQUEST, state.pid, state.pid, state.ts, tag, event.value))
        return out
    msg = event.msg
    if msg.op_seq < state.ts:
        out.stale = True
    elif state.pending and msg.kind is MessageKind.WRITE_ACK and msg.op_seq == state.ts:
        state.ack_mask |= 1 << msg.sender.index
        if qs.first_contained_mask(state.ack_mask) >= 0:
            state.pending = False
            out.response = Response(state.value, Tag(state.ts, 0), 2)
    return out


@dataclass
class MWWriterState:
    """Two-phase writer: discover the highest timestamp, then place the tag.

    write_op advances once per phase, so acknowledgement filtering by
    op_seq also separates the phases of one operation.
    """

    pid: ProcessId
    write_op: int = 0
    phase: str = "idle"  # idle | discover | put
    value: bytes = INITIAL_VALUE
    tag: Optional[Tag] = None
    acks: dict[int, Message] = field(default_factory=dict)
    ack_mask: int = 0


def mw_writer_step(state: MWWriterState, event: Event, qs: QuorumSystem) -> StepOutput:
    out = StepOutput()
    if isinstance(event, Invoke):
        assert state.phase == "idle" and event.value is not None
        state.write_op += 1
        state.phase = "discover"
        state.value = event.value
        state.acks = {}
        state.ack_mask = 0
        broadcast(out, qs, Message(MessageKind.WRITE_DISCOVER, state.pid, state.pid, state.write_op))
        return out
    msg = event.msg
    if msg.op_seq < state.write_op:
        out.stale = True
        return out
    if state.phase == "discover" and msg.kind is MessageKind.DISCOVER_ACK:
        bit = msg.sender.index
        state.acks[bit] = msg
        state.ack_mask |= 1 << bit
        qi = qs.first_contained_mask(state.ack_mask)
        if qi >= 0:
            max_ts = max(state.acks[b].tag.ts for b in bits(qs.masks[qi]))
            state.tag = Tag(max_ts + 1, state.pid.index)
            state.write_op += 1
            state.phase = "put"
            state.acks = {}
            state.ack_mask = 0
            out.notes.append(("wtag", state.tag))
            broadcast(
                out,
                qs,
                Message(MessageKind.WRITE_REQUEST, state.pid, state.pid, state.write_op, state.tag, state.value),
            )
    elif state.phase == "put" and msg.kind is MessageKind.WRITE_ACK:
        state.ack_mask |= 1 << msg.sender.index
        if qs.first_contained_mask(state.ack_mask) >= 0:
            state.phase = "idle"
            out.response = Response(state.value, state.tag, 4)
    return out


# --- servers ---------------------------------------------------------------


def adopt(state, msg: Message, out: StepOutput) -> None:
    """Take over the message's tag/value pair when it is newer."""
    if msg.tag > state.tag:
        state.tag = msg.tag
        state.value = msg.value
        out.notes.append(("adopt", state.tag))


def handle_write_request(state, msg: Message, out: StepOutput, mw: bool) -> None:
    if mw:
        # Adoption is gated on per-writer freshness; the ack is not.
        if state.write_ops.get(msg.client, 0) < msg.op_seq:
            state.write_ops[msg.client] = msg.op_seq
            adopt(state, msg, out)
    else:
        adopt(state, msg, out)
    out.sends.append((msg.client, Message(MessageKind.WRITE_ACK, state.pid, msg.client, msg.op_seq, state.tag)))


@dataclass
class RelayServerState:
    """Server for the relay-based reads (with or without reader echo)."""

    pid: ProcessId
    d_mask: int  # servers sharing a quorum with this one
    mw: bool
    relay_to_reader: bool
    tag: Tag = INITIAL_TAG
    value: bytes = INITIAL_VALUE
    operations: dict[ProcessId, int] = field(default_factory=dict)
    relays: dict[ProcessId, int] = field(default_factory=dict)
    acked: dict[ProcessId, int] = field(default_factory=dict)
    write_ops: dict[ProcessId, int] = field(default_factory=dict)


def make_relay_server(pid: ProcessId, qs: QuorumSystem, mw: bool, relay_to_reader: bool) -> RelayServerState:
    return RelayServerState(pid, qs.relay_mask(pid.index), mw, relay_to_reader)


def relay_server_step(state: RelayServerState, event: Event, qs: QuorumSystem) -> StepOutput:
    out = StepOutput()
    assert isinstance(event, Deliver)
    msg = event.msg
    if msg.kind is MessageKind.READ_REQUEST:
        relay = Message(MessageKind.READ_RELAY, state.pid, msg.client, msg.op_seq, state.tag, state.value)
        out.sends = [(server(b), relay) for b in bits(state.d_mask)]
        if state.relay_to_reader:
            out.sends.append((msg.client, relay))
    elif msg.kind is MessageKind.READ_RELAY:
        adopt(state, msg, out)
        r, ro = msg.client, msg.op_seq
        if state.operations.get(r, 0) < ro:
            state.operations[r] = ro
            state.relays[r] = 0
        if state.operations[r] == ro:
            state.relays[r] |= 1 << msg.sender.index
            if state.acked.get(r, 0) < ro and qs.first_contained_mask(state.relays[r]) >= 0:
                state.acked[r] = ro  # at most one ack per (reader, read_op)
                out.sends.append((r, Message(MessageKind.READ_ACK, state.pid, r, ro, state.tag, state.value)))
    elif msg.kind is MessageKind.WRITE_REQUEST:
        handle_write_request(state, msg, out, state.mw)
    elif msg.kind is MessageKind.WRITE_DISCOVER and state.mw:
        out.sends.append((msg.client, Message(MessageKind.DISCOVER_ACK, state.pid, msg.client, msg.op_seq, state.tag)))
    return out


@dataclass
class PlainServerState:
    """Server for the query/write-back reads: replies straight to the client."""

    pid: ProcessId
    mw: bool
    tag: Tag = INITIAL_TAG
    value: bytes = INITIAL_VALUE
    write_ops: dict[ProcessId, int] = field(default_factory=dict)


def plain_server_step(state: PlainServerState, event: Event, qs: QuorumSystem) -> StepOutput:
    out = StepOutput()
    assert isinstance(event, Deliver)
    msg = event.msg
    if msg.kind is MessageKind.READ_REQUEST:
        out.sends.append((msg.client, Message(MessageKind.READ_ACK, state.pid, msg.client, msg.op_seq, state.tag, state.value)))
    elif msg.kind is MessageKind.READ_RELAY:
        # Write-back of the chosen tag by a reading client.
        adopt(state, msg, out)
        out.sends.append((msg.client, Message(MessageKind.READ_ACK, state.pid, msg.client, msg.op_seq, state.tag, state.value)))
    elif msg.kind is MessageKind.WRITE_REQUEST:
        handle_write_request(state, msg, out, state.mw)
    elif msg.kind is MessageKind.WRITE_DISCOVER and state.mw:
        out.sends.append((msg.client, Message(MessageKind.DISCOVER_ACK, state.pid, msg.client, msg.op_seq, state.tag)))
    return out
