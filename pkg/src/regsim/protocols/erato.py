"""Single-writer register with quorum-view fast reads.

Writes broadcast the next timestamp and finish on one acknowledgement
quorum (2 exchanges).  Reads broadcast a request; every server relays its
pair to the other servers and to the reader, and acknowledges the reader
once it has seen relays from a full quorum.  The reader decides from the
first relay quorum's tag distribution: uniform (complete write) answers
immediately, a provably incomplete maximum answers with the preceding
timestamp, and only the ambiguous case waits for the acknowledgement
round's minimum, giving 2 or 3 exchanges per read.
"""

from __future__ import annotations

from regsim.core import ProcessId
from regsim.protocols import base
from regsim.protocols.base import Event, Response, StepOutput
from regsim.protocols.readers import (
    RelayReaderState,
    quorum_extreme,
    relay_reader_step,
    relay_tag_view,
)
from regsim.quorum import QuorumSystem
from regsim.views import TagView, ViewClass, classify


def make_reader(pid: ProcessId, qs: QuorumSystem) -> RelayReaderState:
    return RelayReaderState(pid)


def make_writer(pid: ProcessId, qs: QuorumSystem) -> base.SWMRWriterState:
    return base.SWMRWriterState(pid)


def make_server(pid: ProcessId, qs: QuorumSystem) -> base.RelayServerState:
    return base.make_relay_server(pid, qs, mw=False, relay_to_reader=True)


def _analyze(state: RelayReaderState, out: StepOutput, qs: QuorumSystem, qi: int) -> None:
    tag_by, _ = relay_tag_view(state, qs, qi)
    cls = classify(qs, TagView(qi, tag_by))
    maxtag = max(tag_by.values())
    out.notes.append(("view", cls.name, maxtag))
    if cls is ViewClass.VIEW1:
        m = quorum_extreme(state.rr, qs.masks[qi], smallest=False)
        state.mode = "idle"
        out.response = Response(m.value, m.tag, 2)
        return
    if cls is ViewClass.VIEW2:
        # The max write is provably incomplete; answer with the preceding
        # timestamp if some quorum member still reports it.
        for b in base.bits(qs.masks[qi]):
            m = state.rr[b]
            if m.tag.ts == maxtag.ts - 1:
                state.mode = "idle"
                out.response = Response(m.value, m.tag, 2)
                return
    # VIEW2 with no holder of the preceding timestamp, or VIEW3: wait for
    # the acknowledgement quorum.
    state.mode = "await"


def erato_reader_step(state: RelayReaderState, event: Event, qs: QuorumSystem) -> StepOutput:
    return relay_reader_step(state, event, qs, _analyze)


def erato_writer_step(state: base.SWMRWriterState, event: Event, qs: QuorumSystem) -> StepOutput:
    return base.swmr_writer_step(state, event, qs)


def erato_server_step(state: base.RelayServerState, event: Event, qs: QuorumSystem) -> StepOutput:
    return base.relay_server_step(state, event, qs)
