"""Step-level traces of the multi-writer variant."""

from regsim.core import Message, MessageKind, Tag, reader, server, writer
from regsim.protocols import Deliver, Invoke
from regsim.protocols import erato_mw
from regsim.protocols.erato_mw import (
    eratomw_reader_step,
    eratomw_server_step,
    eratomw_writer_step,
)
from regsim.quorum import build_majority

QS3 = build_majority(3)
QS4 = build_majority(4)
R0 = reader(0)
W1 = writer(1)


def dack(b, tag, op, w=W1):
    return Message(MessageKind.DISCOVER_ACK, server(b), w, op, tag)


def wack(b, op, w=W1):
    return Message(MessageKind.WRITE_ACK, server(b), w, op, Tag(0, 0))


def relay(b, tag, value, op=1, r=R0):
    return Message(MessageKind.READ_RELAY, server(b), r, op, tag, value)


def ack(b, tag, value, op=1, r=R0):
    return Message(MessageKind.READ_ACK, server(b), r, op, tag, value)


def test_write_discovers_then_places_max_plus_one():
    w = erato_mw.make_writer(W1, QS4)
    out = eratomw_writer_step(w, Invoke(b"v"), QS4)
    assert len(out.sends) == 4
    assert out.sends[0][1].kind is MessageKind.WRITE_DISCOVER and out.sends[0][1].op_seq == 1

    eratomw_writer_step(w, Deliver(dack(0, Tag(3, 1), 1)), QS4)
    eratomw_writer_step(w, Deliver(dack(1, Tag(5, 2), 1)), QS4)
    out = eratomw_writer_step(w, Deliver(dack(2, Tag(4, 1), 1)), QS4)  # quorum {1,2,3}
    assert len(out.sends) == 4
    put = out.sends[0][1]
    assert put.kind is MessageKind.WRITE_REQUEST and put.op_seq == 2
    assert put.tag == Tag(6, 1)  # discovered max 5, own writer id
    assert ("wtag", Tag(6, 1)) in out.notes

    eratomw_writer_step(w, Deliver(wack(0, 2)), QS4)
    eratomw_writer_step(w, Deliver(wack(1, 2)), QS4)
    out = eratomw_writer_step(w, Deliver(wack(2, 2)), QS4)
    assert (out.response.value, out.response.tag, out.response.exchanges) == (b"v", Tag(6, 1), 4)


def test_write_ignores_stale_phase_acks():
    w = erato_mw.make_writer(W1, QS3)
    eratomw_writer_step(w, Invoke(b"v"), QS3)
    eratomw_writer_step(w, Deliver(dack(0, Tag(0, 0), 1)), QS3)
    eratomw_writer_step(w, Deliver(dack(1, Tag(0, 0), 1)), QS3)  # now in put phase
    out = eratomw_writer_step(w, Deliver(dack(2, Tag(9, 9), 1)), QS3)
    assert out.stale and w.tag == Tag(1, 1)


def test_server_write_freshness_guard():
    s = erato_mw.make_server(server(0), QS3)
    req = Message(MessageKind.WRITE_REQUEST, W1, W1, 2, Tag(4, 1), b"new")
    out = eratomw_server_step(s, Deliver(req), QS3)
    assert s.tag == Tag(4, 1)
    assert out.sends[0][1].kind is MessageKind.WRITE_ACK and out.sends[0][1].op_seq == 2
    # A replayed request with an old write_op is acknowledged but not adopted.
    replay = Message(MessageKind.WRITE_REQUEST, W1, W1, 2, Tag(9, 1), b"later")
    out = eratomw_server_step(s, Deliver(replay), QS3)
    assert s.tag == Tag(4, 1) and s.value == b"new"
    assert out.sends[0][1].kind is MessageKind.WRITE_ACK


def test_server_discover_ack_reports_current_tag():
    s = erato_mw.make_server(server(2), QS3)
    s.tag = Tag(7, 0)
    out = eratomw_server_step(s, Deliver(Message(MessageKind.WRITE_DISCOVER, W1, W1, 3)), QS3)
    dst, m = out.sends[0]
    assert dst == W1 and m.kind is MessageKind.DISCOVER_ACK
    assert m.tag == Tag(7, 0) and m.op_seq == 3
    assert s.tag == Tag(7, 0)  # unchanged


def test_server_adopts_on_writer_id_tiebreak():
    s = erato_mw.make_server(server(0), QS3)
    eratomw_server_step(s, Deliver(relay(1, Tag(4, 1), b"a")), QS3)
    eratomw_server_step(s, Deliver(relay(2, Tag(4, 2), b"b")), QS3)
    assert s.tag == Tag(4, 2) and s.value == b"b"


def test_read_discards_incomplete_max_then_answers():
    r = erato_mw.make_reader(R0, QS4)
    eratomw_reader_step(r, Invoke(), QS4)
    eratomw_reader_step(r, Deliver(relay(0, Tag(5, 2), b"new")), QS4)
    eratomw_reader_step(r, Deliver(relay(1, Tag(4, 1), b"old")), QS4)
    out = eratomw_reader_step(r, Deliver(relay(2, Tag(4, 1), b"old")), QS4)
    assert (out.response.value, out.response.tag, out.response.exchanges) == (b"old", Tag(4, 1), 2)


def test_read_ambiguity_falls_back_to_ack_minimum():
    r = erato_mw.make_reader(R0, QS4)
    eratomw_reader_step(r, Invoke(), QS4)
    eratomw_reader_step(r, Deliver(relay(0, Tag(5, 2), b"new")), QS4)
    eratomw_reader_step(r, Deliver(relay(1, Tag(5, 2), b"new")), QS4)
    out = eratomw_reader_step(r, Deliver(relay(2, Tag(4, 1), b"old")), QS4)
    assert out.response is None and r.mode == "await"
    eratomw_reader_step(r, Deliver(ack(0, Tag(5, 2), b"new")), QS4)
    eratomw_reader_step(r, Deliver(ack(1, Tag(5, 2), b"new")), QS4)
    out = eratomw_reader_step(r, Deliver(ack(3, Tag(5, 2), b"new")), QS4)
    assert (out.response.tag, out.response.exchanges) == (Tag(5, 2), 3)


def test_read_uniform_relays_fast():
    r = erato_mw.make_reader(R0, QS3)
    eratomw_reader_step(r, Invoke(), QS3)
    eratomw_reader_step(r, Deliver(relay(0, Tag(2, 1), b"x")), QS3)
    out = eratomw_reader_step(r, Deliver(relay(1, Tag(2, 1), b"x")), QS3)
    assert (out.response.value, out.response.exchanges) == (b"x", 2)
