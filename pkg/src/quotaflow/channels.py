"""Channel codecs: the text-message grammar and the framed app protocol.

Pure parse/compose — no ledger access. The text grammar (inbound) and the
outbound templates are frozen; inbound and outbound first tokens are
disjoint, so any composed body is distinguishable from a command.

Inbound grammar (keywords case-insensitive, single-space separated):

    REQ <quota-code> [@<merchant-code>] [<ITEM>=<qty> ...]
    OK <pin>
    NO
    BAL
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass

from .errors import FrameError, ParseError
from .money import Money, Quantity

TEXT_LIMIT = 160
MAX_FRAME = 64 * 1024

_CODE_RE = re.compile(r"^[A-Z0-9]+$")
_PIN_RE = re.compile(r"^\d{4}$")
_PART_RE = re.compile(r"^(\d+)/(\d+) (.*)$", re.S)


@dataclass(frozen=True)
class Request:
    quota_code: str
    merchant_code: str | None = None
    items: tuple[tuple[str, Quantity], ...] | None = None  # None = full package

    def render(self) -> str:
        parts = ["REQ", self.quota_code]
        if self.merchant_code:
            parts.append(f"@{self.merchant_code}")
        for code, qty in self.items or ():
            parts.append(f"{code}={qty.render()}")
        return " ".join(parts)


@dataclass(frozen=True)
class Confirm:
    pin: str

    def render(self) -> str:
        return f"OK {self.pin}"


@dataclass(frozen=True)
class Abandon:
    def render(self) -> str:
        return "NO"


@dataclass(frozen=True)
class BalanceQuery:
    def render(self) -> str:
        return "BAL"


InboundText = Request | Confirm | Abandon | BalanceQuery


def _code(token: str, position: int) -> str:
    code = token.upper()
    if not _CODE_RE.match(code):
        raise ParseError(position, f"bad code {token!r}")
    return code


def parse_text(body: str) -> InboundText:
    tokens = body.split(" ")
    if any(not t for t in tokens):
        raise ParseError(tokens.index("") + 1, "empty token")
    keyword = tokens[0].upper()
    if keyword == "REQ":
        if len(tokens) < 2:
            raise ParseError(2, "missing quota code")
        quota = _code(tokens[1], 2)
        merchant = None
        rest = tokens[2:]
        position = 3
        if rest and rest[0].startswith("@"):
            merchant = _code(rest[0][1:], position)
            rest, position = rest[1:], position + 1
        items = []
        for token in rest:
            name, sep, qty_text = token.partition("=")
            if not sep:
                raise ParseError(position, f"expected ITEM=QTY, got {token!r}")
            try:
                qty = Quantity.parse(qty_text)
            except ValueError:
                raise ParseError(position, f"bad quantity {qty_text!r}") from None
            items.append((_code(name, position), qty))
            position += 1
        return Request(quota, merchant, tuple(items) if items else None)
    if keyword == "OK":
        if len(tokens) < 2:
            raise ParseError(2, "missing pin")
        if len(tokens) > 2:
            raise ParseError(3, "trailing input")
        if not _PIN_RE.match(tokens[1]):
            raise ParseError(2, "pin must be 4 digits")
        return Confirm(tokens[1])
    if keyword == "NO":
        if len(tokens) > 1:
            raise ParseError(2, "trailing input")
        return Abandon()
    if keyword == "BAL":
        if len(tokens) > 1:
            raise ParseError(2, "trailing input")
        return BalanceQuery()
    raise ParseError(1, f"unknown command {tokens[0]!r}")


# --- outbound templates -----------------------------------------------------


def compose_charged(quota_code: str, period_index: int) -> str:
    return f"CHARGED {quota_code} P{period_index}"


def compose_confirm(voucher_id: str, due: Money, refund: Money) -> str:
    # The trailing PIN is a literal placeholder: the secret itself is never
    # echoed outbound.
    return f"CONFIRM {voucher_id} PAY {due.render()} REFUND {refund.render()} REPLY OK PIN"


def compose_done(voucher_id: str, items: list[tuple[str, Quantity]], refund: Money) -> str:
    taken = " ".join(f"{code}={qty.render()}" for code, qty in items if qty.millis > 0)
    middle = f" {taken}" if taken else ""
    return f"DONE {voucher_id}{middle} REFUND {refund.render()}"


def compose_err(code: str) -> str:
    return f"ERR {code}"


def compose_balance(balance: Money) -> str:
    return f"BALANCE {balance.render()}"


def compose_cancelled(voucher_id: str) -> str:
    return f"CANCELLED {voucher_id}"


def split_for_transport(body: str) -> list[str]:
    """Split an outbound body into numbered parts, each within the limit."""
    if len(body) <= TEXT_LIMIT:
        return [body]
    n = 2
    while True:
        budget = TEXT_LIMIT - (2 * len(str(n)) + 2)
        needed = -(-len(body) // budget)
        if needed <= n:
            break
        n = needed
    chunks = [body[i : i + budget] for i in range(0, len(body), budget)]
    return [f"{k}/{len(chunks)} {chunk}" for k, chunk in enumerate(chunks, start=1)]


def reassemble(parts: list[str]) -> str:
    """Inverse of split_for_transport; part order does not matter."""
    if len(parts) == 1 and not _PART_RE.match(parts[0]):
        return parts[0]
    found: dict[int, str] = {}
    total = None
    for part in parts:
        m = _PART_RE.match(part)
        if not m:
            raise ParseError(1, f"unlabelled part {part!r}")
        k, n, chunk = int(m.group(1)), int(m.group(2)), m.group(3)
        if total is None:
            total = n
        if n != total or not 1 <= k <= n or k in found:
            raise ParseError(1, "inconsistent part labels")
        found[k] = chunk
    if total is None or len(found) != total:
        raise ParseError(1, "missing parts")
    return "".join(found[k] for k in range(1, total + 1))


# --- gateway line protocol ---------------------------------------------------


def split_gateway_line(line: str) -> tuple[str, str]:
    mobile, sep, body = line.partition("|")
    if not sep:
        raise ParseError(1, "expected <mobile>|<body>")
    return mobile, body


def format_gateway_line(mobile: str, body: str) -> str:
    return f"{mobile}|{body}"


# --- app frames ---------------------------------------------------------------


def encode_frame(message: dict) -> bytes:
    payload = json.dumps(
        {
            "kind": message["kind"],
            "session": message.get("session"),
            "body": message.get("body", {}),
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode()
    if len(payload) > MAX_FRAME:
        raise FrameError(f"frame too large: {len(payload)} bytes")
    return struct.pack(">I", len(payload)) + payload


def decode_frame(data: bytes) -> dict:
    if len(data) < 4:
        raise FrameError("truncated length prefix")
    (length,) = struct.unpack(">I", data[:4])
    if length > MAX_FRAME:
        raise FrameError(f"frame too large: {length} bytes")
    payload = data[4:]
    if len(payload) != length:
        raise FrameError(f"expected {length} payload bytes, got {len(payload)}")
    try:
        message = json.loads(payload.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameError(f"unreadable frame: {exc}") from exc
    if not isinstance(message, dict) or set(message) != {"kind", "session", "body"}:
        raise FrameError("frame must carry kind, session, body")
    return message


def read_frames(buffer: bytes) -> tuple[list[dict], bytes]:
    """Decode every complete frame at the head of a stream buffer."""
    frames = []
    while len(buffer) >= 4:
        (length,) = struct.unpack(">I", buffer[:4])
        if length > MAX_FRAME:
            raise FrameError(f"frame too large: {length} bytes")
        if len(buffer) < 4 + length:
            break
        frames.append(decode_frame(buffer[: 4 + length]))
        buffer = buffer[4 + length :]
    return frames, buffer
