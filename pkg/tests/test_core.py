from hypothesis import given
from hypothesis import strategies as st

from regsim.core import (
    HEADER_OCTETS,
    INITIAL_TAG,
    INITIAL_VALUE,
    Comparison,
    Message,
    MessageKind,
    Tag,
    compare_tags,
    reader,
    server,
    writer,
)

tags = st.builds(Tag, ts=st.integers(0, 50), wid=st.integers(0, 8))


def test_compare_tags_examples():
    assert compare_tags(Tag(1, 5), Tag(2, 1)) is Comparison.LESS  # ts dominates
    assert compare_tags(Tag(3, 2), Tag(3, 1)) is Comparison.GREATER  # wid breaks ties
    assert compare_tags(Tag(4, 0), Tag(4, 0)) is Comparison.EQUAL


def test_initial_register_state():
    assert INITIAL_TAG == Tag(0, 0)
    assert INITIAL_VALUE == b""


@given(tags, tags)
def test_compare_matches_dataclass_order(a, b):
    cmp = compare_tags(a, b)
    assert (cmp is Comparison.LESS) == (a < b)
    assert (cmp is Comparison.GREATER) == (a > b)
    assert (cmp is Comparison.EQUAL) == (a == b)


@given(tags, tags, tags)
def test_tag_order_is_total(a, b, c):
    assert sum(1 for r in (a < b, b < a, a == b) if r) == 1  # trichotomy
    if a < b and b < c:
        assert a < c


@given(st.integers(1, 50), st.integers(0, 8))
def test_written_tags_exceed_initial(ts, wid):
    assert Tag(ts, wid) > INITIAL_TAG


def test_process_id_total_order():
    assert reader(0) < reader(1) < writer(0) < server(0) < server(3)
    assert str(server(2)) == "s2"


def test_message_size_header_plus_payload():
    m = Message(MessageKind.READ_RELAY, server(0), reader(0), 1, Tag(1, 0), b"x" * 64)
    assert m.size_bits() == (HEADER_OCTETS + 64) * 8
    bare = Message(MessageKind.READ_REQUEST, reader(0), reader(0), 1)
    assert bare.size_bits() == HEADER_OCTETS * 8
