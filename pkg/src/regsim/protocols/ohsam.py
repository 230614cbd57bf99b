"""Relay-synchronised baseline without the fast path.

Servers relay read requests among themselves only (never to the reader)
and acknowledge after a full relay quorum; the reader always waits for an
acknowledgement quorum and returns its minimum tag, so every read costs
exactly 3 exchanges.  Writes are the corresponding query-free broadcast:
plain timestamp in single-writer mode, discover/put in multi-writer mode.
"""

from __future__ import annotations

from regsim.core import ProcessId, Role
from regsim.protocols import base
from regsim.protocols.base import Event, StepOutput
from regsim.protocols.readers import RelayReaderState, relay_reader_step
from regsim.quorum import QuorumSystem


def make_reader(pid: ProcessId, qs: QuorumSystem) -> RelayReaderState:
    return RelayReaderState(pid)


def make_writer(pid: ProcessId, qs: QuorumSystem, mw: bool):
    return base.MWWriterState(pid) if mw else base.SWMRWriterState(pid)


def make_server(pid: ProcessId, qs: QuorumSystem, mw: bool) -> base.RelayServerState:
    return base.make_relay_server(pid, qs, mw=mw, relay_to_reader=False)


def baseline_ohsam_step(role: Role, state, event: Event, qs: QuorumSystem, variant: str = "swmr") -> StepOutput:
    if role is Role.READER:
        return relay_reader_step(state, event, qs, analyze=None)
    if role is Role.WRITER:
        if variant == "mwmr":
            return base.mw_writer_step(state, event, qs)
        return base.swmr_writer_step(state, event, qs)
    return base.relay_server_step(state, event, qs)
