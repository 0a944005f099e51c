"""Text grammar, outbound templates, transport splitting, and app frames."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quotaflow.channels import (
    MAX_FRAME,
    TEXT_LIMIT,
    Abandon,
    BalanceQuery,
    Confirm,
    Request,
    compose_balance,
    compose_cancelled,
    compose_charged,
    compose_confirm,
    compose_done,
    compose_err,
    decode_frame,
    encode_frame,
    format_gateway_line,
    parse_text,
    read_frames,
    reassemble,
    split_for_transport,
    split_gateway_line,
)
from quotaflow.errors import FrameError, ParseError
from quotaflow.money import Money, Quantity

codes = st.from_regex(r"^[A-Z0-9]{1,10}$")
pins = st.from_regex(r"^\d{4}$")
qtys = st.integers(min_value=0, max_value=99_999).map(Quantity)

requests = st.builds(
    Request,
    quota_code=codes,
    merchant_code=st.one_of(st.none(), codes),
    items=st.one_of(
        st.none(),
        st.lists(st.tuples(codes, qtys), min_size=1, max_size=5, unique_by=lambda t: t[0]).map(
            tuple
        ),
    ),
)
inbound = st.one_of(requests, st.builds(Confirm, pin=pins), st.just(Abandon()), st.just(BalanceQuery()))


@settings(max_examples=300, deadline=None)
@given(message=inbound)
def test_inbound_render_parse_round_trip(message):
    assert parse_text(message.render()) == message


def test_grammar_examples():
    assert parse_text("REQ FOOD") == Request("FOOD")
    assert parse_text("req food @m1 oil=0.5") == Request(
        "FOOD", "M1", (("OIL", Quantity(500)),)
    )
    assert parse_text("OK 4821") == Confirm("4821")
    assert parse_text("no") == Abandon()
    assert parse_text("BAL") == BalanceQuery()


@pytest.mark.parametrize(
    "body,position",
    [
        ("HELLO", 1),
        ("REQ", 2),
        ("REQ !", 2),
        ("REQ FOOD X", 3),
        ("REQ FOOD @M1 OIL=abc", 4),
        ("REQ FOOD OIL=1 SUGAR", 4),
        ("OK", 2),
        ("OK 123", 2),
        ("OK 1234 x", 3),
        ("NO thanks", 2),
        ("BAL now", 2),
        ("REQ  FOOD", 2),  # double space = empty token
        ("", 1),
    ],
)
def test_parse_errors_carry_token_position(body, position):
    with pytest.raises(ParseError) as err:
        parse_text(body)
    assert err.value.position == position


def test_outbound_templates_exact():
    assert compose_charged("FOOD", 0) == "CHARGED FOOD P0"
    assert (
        compose_confirm("V1", Money(4000), Money(600))
        == "CONFIRM V1 PAY 40.00 REFUND 6.00 REPLY OK PIN"
    )
    assert (
        compose_done("V1", [("OIL", Quantity(0)), ("SUGAR", Quantity(4000))], Money(600))
        == "DONE V1 SUGAR=4.000 REFUND 6.00"
    )
    assert compose_done("V2", [("OIL", Quantity(0))], Money(600)) == "DONE V2 REFUND 6.00"
    assert compose_err("NO_SESSION") == "ERR NO_SESSION"
    assert compose_balance(Money(600)) == "BALANCE 6.00"
    assert compose_cancelled("V3") == "CANCELLED V3"


def test_outbound_first_tokens_disjoint_from_inbound():
    outbound = {"CHARGED", "CONFIRM", "DONE", "ERR", "BALANCE", "CANCELLED"}
    inbound_keywords = {"REQ", "OK", "NO", "BAL"}
    assert not outbound & inbound_keywords


@settings(max_examples=200, deadline=None)
@given(body=st.text(st.characters(blacklist_categories=("Cs",)), min_size=0, max_size=2000))
def test_split_reassemble_round_trip(body):
    parts = split_for_transport(body)
    assert all(len(p) <= TEXT_LIMIT for p in parts)
    assert reassemble(parts) == body
    if len(body) <= TEXT_LIMIT:
        assert parts == [body]


def test_reassemble_is_order_insensitive():
    body = "X" * 1000
    parts = split_for_transport(body)
    assert len(parts) > 1
    rng = random.Random(5)
    for _ in range(10):
        shuffled = parts[:]
        rng.shuffle(shuffled)
        assert reassemble(shuffled) == body


def test_reassemble_rejects_damage():
    parts = split_for_transport("Y" * 500)
    with pytest.raises(ParseError):
        reassemble(parts[:-1])  # missing part
    with pytest.raises(ParseError):
        reassemble(parts + [parts[0]])  # duplicate label
    with pytest.raises(ParseError):
        reassemble([parts[0], "2/9 " + parts[1][4:]])  # inconsistent total


def test_gateway_line_round_trip():
    assert split_gateway_line(format_gateway_line("+20100", "REQ FOOD")) == ("+20100", "REQ FOOD")
    # body may itself contain the separator
    assert split_gateway_line("+20100|A|B")[1] == "A|B"
    with pytest.raises(ParseError):
        split_gateway_line("no-separator")


json_scalars = st.one_of(
    st.none(), st.booleans(), st.integers(min_value=-(10**9), max_value=10**9), st.text(max_size=40)
)
json_bodies = st.dictionaries(
    st.text(min_size=1, max_size=12),
    st.one_of(json_scalars, st.lists(json_scalars, max_size=4)),
    max_size=6,
)


@settings(max_examples=300, deadline=None)
@given(
    kind=st.sampled_from(["request", "adjust", "submit", "confirm", "abandon", "join"]),
    session=st.one_of(st.none(), st.from_regex(r"^T\d{1,6}$")),
    body=json_bodies,
)
def test_frame_encode_decode_round_trip(kind, session, body):
    message = {"kind": kind, "session": session, "body": body}
    assert decode_frame(encode_frame(message)) == message


def test_frame_rejects_truncation_and_oversize():
    frame = encode_frame({"kind": "join", "session": None, "body": {"beneficiary": "B1"}})
    with pytest.raises(FrameError):
        decode_frame(frame[:-1])
    with pytest.raises(FrameError):
        decode_frame(frame[:3])
    with pytest.raises(FrameError):
        decode_frame(frame + b"x")
    with pytest.raises(FrameError):
        encode_frame({"kind": "join", "session": None, "body": {"blob": "x" * (MAX_FRAME + 1)}})
    # a length prefix pointing past the cap is refused before reading
    huge = (MAX_FRAME + 1).to_bytes(4, "big") + b"{}"
    with pytest.raises(FrameError):
        decode_frame(huge)


def test_frame_rejects_wrong_shape():
    payload = json.dumps(["not", "a", "dict"]).encode()
    with pytest.raises(FrameError):
        decode_frame(len(payload).to_bytes(4, "big") + payload)
    payload = json.dumps({"kind": "x", "session": None}).encode()  # missing body
    with pytest.raises(FrameError):
        decode_frame(len(payload).to_bytes(4, "big") + payload)
    with pytest.raises(FrameError):
        decode_frame((2).to_bytes(4, "big") + b"\xff\xfe")


def test_read_frames_stream_reassembly():
    messages = [
        {"kind": "join", "session": None, "body": {"beneficiary": f"B{i}"}} for i in range(5)
    ]
    stream = b"".join(encode_frame(m) for m in messages)
    # feed in awkward chunk sizes; frames must come out whole and in order
    out, buffer = [], b""
    for i in range(0, len(stream), 7):
        buffer += stream[i : i + 7]
        frames, buffer = read_frames(buffer)
        out.extend(frames)
    assert out == messages
    assert buffer == b""
