"""Multi-writer register with iterative quorum-view reads.

Writes discover the highest timestamp from a quorum, then place
(max+1, writer id) with a second round: always 4 exchanges.  Reads reuse
the relay scheme; a completed relay quorum is analysed iteratively,
discarding provably incomplete maxima until a uniform remainder answers
at 2 exchanges or ambiguity sends the read to the acknowledgement round.
"""

from __future__ import annotations

from regsim.core import ProcessId
from regsim.protocols import base
from regsim.protocols.base import Event, Response, StepOutput
from regsim.protocols.readers import RelayReaderState, relay_reader_step, relay_tag_view
from regsim.quorum import QuorumSystem
from regsim.views import ReturnTag, TagView, iterative_analyze


def make_reader(pid: ProcessId, qs: QuorumSystem) -> RelayReaderState:
    return RelayReaderState(pid)


def make_writer(pid: ProcessId, qs: QuorumSystem) -> base.MWWriterState:
    return base.MWWriterState(pid)


def make_server(pid: ProcessId, qs: QuorumSystem) -> base.RelayServerState:
    return base.make_relay_server(pid, qs, mw=True, relay_to_reader=True)


def _analyze(state: RelayReaderState, out: StepOutput, qs: QuorumSystem, qi: int) -> None:
    tag_by, value_by = relay_tag_view(state, qs, qi)
    decision = iterative_analyze(qs, TagView(qi, tag_by, value_by))
    if isinstance(decision, ReturnTag):
        state.mode = "idle"
        out.response = Response(decision.value, decision.tag, 2)
    else:
        state.mode = "await"


def eratomw_reader_step(state: RelayReaderState, event: Event, qs: QuorumSystem) -> StepOutput:
    return relay_reader_step(state, event, qs, _analyze)


def eratomw_writer_step(state: base.MWWriterState, event: Event, qs: QuorumSystem) -> StepOutput:
    return base.mw_writer_step(state, event, qs)


def eratomw_server_step(state: base.RelayServerState, event: Event, qs: QuorumSystem) -> StepOutput:
    return base.relay_server_step(state, event, qs)
