"""Reader-side collection scaffolding shared by the relay-based protocols.

A relay read broadcasts one request and then watches two responder sets:
relays echoed directly to the reader (RR) and post-synchronisation
acknowledgements (RA).  The acknowledgement quorum is always checked first;
how a completed relay quorum is analysed is what distinguishes the
protocols, so that part is injected as a callable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from regsim.core import Message, MessageKind, ProcessId, Tag
from regsim.protocols.base import Deliver, Event, Invoke, Response, StepOutput, bits, broadcast
from regsim.quorum import QuorumSystem


@dataclass
class RelayReaderState:
    pid: ProcessId
    read_op: int = 0
    mode: str = "idle"  # idle | collect | await
    rr: dict[int, Message] = field(default_factory=dict)
    rr_mask: int = 0
    ra: dict[int, Message] = field(default_factory=dict)
    ra_mask: int = 0


# Called when the first relay quorum / an acknowledgement quorum completes.
Analyzer = Callable[[RelayReaderState, StepOutput, QuorumSystem, int], None]
AckResponder = Callable[[RelayReaderState, StepOutput, QuorumSystem, int], None]


def quorum_extreme(msgs: dict[int, Message], qmask: int, smallest: bool) -> Message:
    """The quorum member's message with the least/greatest tag (first bit wins ties)."""
    best: Optional[Message] = None
    for b in bits(qmask):
        m = msgs[b]
        if best is None or (m.tag < best.tag if smallest else m.tag > best.tag):
            best = m
    assert best is not None
    return best


def respond_min_acks(state: RelayReaderState, out: StepOutput, qs: QuorumSystem, qi: int) -> None:
    m = quorum_extreme(state.ra, qs.masks[qi], smallest=True)
    state.mode = "idle"
    out.response = Response(m.value, m.tag, 3)


def relay_reader_step(
    state: RelayReaderState,
    event: Event,
    qs: QuorumSystem,
    analyze: Optional[Analyzer],
    on_acks: AckResponder = respond_min_acks,
) -> StepOutput:
    out = StepOutput()
    if isinstance(event, Invoke):
        assert state.mode == "idle" and event.value is None
        state.read_op += 1
        state.mode = "collect"
        state.rr = {}
        state.rr_mask = 0
        state.ra = {}
        state.ra_mask = 0
        broadcast(out, qs, Message(MessageKind.READ_REQUEST, state.pid, state.pid, state.read_op))
        return out
    msg = event.msg
    if msg.op_seq < state.read_op:
        out.stale = True
        return out
    if state.mode == "idle":
        return out
    bit = msg.sender.index
    if msg.kind is MessageKind.READ_ACK:
        state.ra[bit] = msg
        state.ra_mask |= 1 << bit
        qi = qs.first_contained_mask(state.ra_mask)
        if qi >= 0:
            on_acks(state, out, qs, qi)
    elif msg.kind is MessageKind.READ_RELAY and state.mode == "collect" and analyze is not None:
        state.rr[bit] = msg
        state.rr_mask |= 1 << bit
        qi = qs.first_contained_mask(state.rr_mask)
        if qi >= 0:
            analyze(state, out, qs, qi)
    return out


def relay_tag_view(state: RelayReaderState, qs: QuorumSystem, qi: int) -> tuple[dict[int, Tag], dict[int, bytes]]:
    """Per-universe-id tag and value maps for the completed relay quorum."""
    tag_by = {}
    value_by = {}
    for b in bits(qs.masks[qi]):
        m = state.rr[b]
        tag_by[qs.members[b]] = m.tag
        value_by[qs.members[b]] = m.value
    return tag_by, value_by
