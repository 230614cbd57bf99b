"""Deterministic discrete-event simulation of the message-passing network.

Topologies mirror a routed LAN: a chain of routers with either one server
per router (series) or every server on the first router (star); clients
attach round-robin across the routers.  A message's delay is the sum over
its path links of propagation plus transmission (size/bandwidth), plus one
uniform jitter draw; there is no queueing.  Event order is (time,
insertion sequence), the RNG is seeded per run, and nodes perform no
computation in simulated time, so a run is a pure function of
(workload, crash schedule, seed).

Crashed nodes process no event from their crash time on; messages already
in flight from them still deliver.  Self-addressed messages (a server
relaying to itself) bypass the network with a fixed one-microsecond local
handoff so that delivery always happens strictly after the send.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from regsim.core import (
    Message,
    OperationRecord,
    ProcessId,
    Role,
    reader,
    server,
    writer,
)
from regsim.protocols import Algorithm, Deliver, Invoke
from regsim.quorum import QuorumSystem

MBPS = 1e6
LOOPBACK_DELAY = 1e-6
DEFAULT_JITTER_MAX = 0.001
DEFAULT_CAP_S = 300.0


@dataclass(frozen=True)
class LinkParams:
    bw_bps: float
    prop_s: float


ROUTER_LINK = LinkParams(10 * MBPS, 0.006)
CLIENT_LINK = LinkParams(5 * MBPS, 0.004)
SERIES_SERVER_LINK = LinkParams(10 * MBPS, 0.002)
STAR_SERVER_LINK = LinkParams(50 * MBPS, 0.002)


@dataclass(frozen=True)
class TopologySpec:
    """Shape and link parameters; node placement happens in build_topology."""

    kind: str  # "series" | "star"
    routers: Optional[int] = None  # defaults to one per server
    router_link: LinkParams = ROUTER_LINK
    server_link: Optional[LinkParams] = None  # defaults by kind
    client_link: LinkParams = CLIENT_LINK

    def effective_server_link(self) -> LinkParams:
        if self.server_link is not None:
            return self.server_link
        return SERIES_SERVER_LINK if self.kind == "series" else STAR_SERVER_LINK


@dataclass
class Network:
    spec: TopologySpec
    routers: int
    router_of: dict[ProcessId, int]
    access: dict[ProcessId, LinkParams]
    jitter_max: float = DEFAULT_JITTER_MAX
    _params: dict[tuple[ProcessId, ProcessId], tuple[float, float]] = field(default_factory=dict)

    def nodes(self) -> list[ProcessId]:
        return list(self.router_of)

    def router_hops(self, a: ProcessId, b: ProcessId) -> int:
        return abs(self.router_of[a] - self.router_of[b])

    def path_params(self, src: ProcessId, dst: ProcessId) -> tuple[float, float]:
        """(total propagation seconds, total seconds-per-bit) for the path."""
        key = (src, dst)
        got = self._params.get(key)
        if got is None:
            sa, da = self.access[src], self.access[dst]
            hops = self.router_hops(src, dst)
            prop = sa.prop_s + da.prop_s + hops * self.spec.router_link.prop_s
            per_bit = 1.0 / sa.bw_bps + 1.0 / da.bw_bps + hops / self.spec.router_link.bw_bps
            got = self._params[key] = (prop, per_bit)
        return got


def build_topology(spec: TopologySpec, n_servers: int, n_readers: int, n_writers: int) -> Network:
    if n_servers < 1:
        raise ValueError("need at least one server")
    routers = spec.routers if spec.routers is not None else n_servers
    if routers < 1:
        raise ValueError("need at least one router")
    if spec.kind == "series":
        if routers != n_servers:
            raise ValueError("series topology places one server per router")
        server_router = {i: i for i in range(n_servers)}
    elif spec.kind == "star":
        server_router = {i: 0 for i in range(n_servers)}
    else:
        raise ValueError("unknown topology kind %r" % spec.kind)

    router_of: dict[ProcessId, int] = {}
    access: dict[ProcessId, LinkParams] = {}
    slink = spec.effective_server_link()
    for i in range(n_servers):
        router_of[server(i)] = server_router[i]
        access[server(i)] = slink
    clients = [reader(i) for i in range(n_readers)] + [writer(i) for i in range(n_writers)]
    for ordinal, pid in enumerate(clients):
        router_of[pid] = ordinal % routers
        access[pid] = spec.client_link
    return Network(spec, routers, router_of, access)


def message_delay(net: Network, src: ProcessId, dst: ProcessId, size_bits: int, rng: random.Random) -> float:
    """Path propagation + transmission + one jitter draw; src must differ from dst."""
    assert src != dst, "loopback is handled by the simulator"
    prop, per_bit = net.path_params(src, dst)
    d = prop + size_bits * per_bit
    if net.jitter_max > 0.0:
        d += rng.uniform(0.0, net.jitter_max)
    return d


@dataclass(frozen=True)
class WorkItem:
    time: float
    pid: ProcessId
    kind: str  # "read" | "write"
    value: Optional[bytes] = None


@dataclass
class Trace:
    """Everything observable about one run, in event order."""

    algorithm: str = ""
    seed: int = 0
    records: list[tuple] = field(default_factory=list)
    ops: dict[int, OperationRecord] = field(default_factory=dict)
    invocations: dict[tuple[ProcessId, int], int] = field(default_factory=dict)
    crash_at: dict[ProcessId, float] = field(default_factory=dict)
    view_events: list[tuple] = field(default_factory=list)
    stale_drops: int = 0
    skipped_invokes: int = 0
    incomplete: bool = False
    end_time: float = 0.0
    meta: dict[str, str] = field(default_factory=dict)  # config echo for reports

    def live(self, pid: ProcessId) -> bool:
        return pid not in self.crash_at

    def operations(self) -> list[OperationRecord]:
        return [self.ops[k] for k in sorted(self.ops)]


def surviving_quorum_exists(qs: QuorumSystem, crashed_server_indices: Iterable[int]) -> bool:
    live = (1 << qs.n) - 1
    for i in crashed_server_indices:
        live &= ~(1 << i)
    return qs.first_contained_mask(live) >= 0


def run(
    network: Network,
    algorithm: Algorithm,
    qs: QuorumSystem,
    workload: Sequence[WorkItem],
    crash_schedule: Sequence[tuple[ProcessId, float]] = (),
    seed: int = 0,
    cap_s: float = DEFAULT_CAP_S,
) -> Trace:
    rng = random.Random("%d:net" % seed)
    trace = Trace(algorithm=algorithm.name, seed=seed)
    states = {pid: algorithm.make(pid, qs) for pid in network.nodes()}
    for pid, t in crash_schedule:
        trace.crash_at[pid] = min(t, trace.crash_at.get(pid, t))

    heap: list[tuple] = []
    seq = 0

    def push(t: float, kind: str, payload) -> None:
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, payload))
        seq += 1

    for pid in sorted(trace.crash_at):
        push(trace.crash_at[pid], "crash", pid)
    for item in sorted(workload, key=lambda w: (w.time, w.pid)):
        push(item.time, "invoke", item)

    def dead(pid: ProcessId, t: float) -> bool:
        return trace.crash_at.get(pid, float("inf")) <= t

    current_op: dict[ProcessId, Optional[int]] = {pid: None for pid in states}
    ordinal: dict[ProcessId, int] = {pid: 0 for pid in states}
    next_op = 1

    def handle_output(pid: ProcessId, t: float, out) -> None:
        nonlocal seq
        if out.stale:
            trace.stale_drops += 1
        op_id = current_op[pid]
        for note in out.notes:
            if note[0] == "wtag" and op_id is not None:
                trace.ops[op_id].tag = note[1]
                trace.records.append(("wtag", t, pid, op_id, note[1].ts, note[1].wid))
            elif note[0] == "adopt":
                trace.records.append(("tag", t, pid, note[1].ts, note[1].wid))
            elif note[0] == "view":
                trace.view_events.append((t, pid, note[1], note[2]))
        for dst, msg in out.sends:
            if dst == pid:
                delay = LOOPBACK_DELAY
            else:
                delay = message_delay(network, pid, dst, msg.size_bits(), rng)
            arrive = t + delay
            trace.records.append(
                ("snd", t, pid, dst, msg.kind.value, msg.client, msg.op_seq, arrive)
            )
            push(arrive, "deliver", (dst, msg))
        if out.response is not None:
            assert op_id is not None, "response outside an operation"
            op = trace.ops[op_id]
            assert op.responded_at is None, "second response for one operation"
            op.responded_at = t
            op.tag = out.response.tag
            op.value = out.response.value
            op.exchanges = out.response.exchanges
            current_op[pid] = None
            trace.records.append(
                ("res", t, pid, op_id, out.response.exchanges, out.response.tag.ts,
                 out.response.tag.wid, out.response.value.hex())
            )

    last_t = 0.0
    while heap:
        if heap[0][0] > cap_s:
            break
        t, _, kind, payload = heapq.heappop(heap)
        last_t = t
        if kind == "crash":
            trace.records.append(("crs", t, payload))
            continue
        if kind == "invoke":
            item: WorkItem = payload
            pid = item.pid
            if dead(pid, t):
                continue
            if current_op[pid] is not None:
                trace.skipped_invokes += 1
                continue
            op_id = next_op
            next_op += 1
            ordinal[pid] += 1
            # Writes carry their intended value from invocation on, so a
            # crashed write still shows what it was writing.
            value = item.value if item.kind == "write" else None
            trace.ops[op_id] = OperationRecord(op_id, pid, item.kind, t, value=value)
            trace.invocations[(pid, ordinal[pid])] = op_id
            current_op[pid] = op_id
            trace.records.append(
                ("inv", t, pid, op_id, item.kind, value.hex() if value is not None else "-")
            )
            event = Invoke(item.value if item.kind == "write" else None)
            handle_output(pid, t, algorithm.step(pid.role, states[pid], event, qs))
            continue
        dst, msg = payload
        if dead(dst, t):
            continue
        trace.records.append(("dlv", t, dst, msg.sender, msg.kind.value, msg.client, msg.op_seq))
        handle_output(dst, t, algorithm.step(dst.role, states[dst], Deliver(msg), qs))

    trace.end_time = min(last_t, cap_s) if not heap else cap_s
    pending_live = any(
        op.responded_at is None and trace.live(op.process) for op in trace.ops.values()
    )
    unreached = [e for e in heap if e[2] == "invoke" and not dead(e[3].pid, e[0])]
    trace.incomplete = pending_live or bool(unreached)
    trace.records.append(("end", trace.end_time, "incomplete" if trace.incomplete else "complete",
                          trace.stale_drops, trace.skipped_invokes))
    return trace
