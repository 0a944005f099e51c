"""Scripted actor sequences: one step per line, virtual time first.

    <iso-datetime> <channel> <actor> <rest...>

Channels:
  text    rest is the message body ("REQ FOOD OIL=0", "OK 4821", ...)
  app     join | request Q [@M] [ITEM=qty ...] | adjust ITEM=qty |
          submit | confirm <pin> | abandon
  admin   charge [iso-datetime]
  assert  voucher V1 state=Delivered | balance B1 6.00 |
          entitlement B1 S1 0 Claimed        (actor field unused: "-")

App steps after a request bind to the session announced to that actor by
the latest inbound frame, so scripts never hard-code session ids. Lines
starting with '#' and blank lines are skipped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime

from ..money import Money


@dataclass
class Step:
    at: datetime
    channel: str
    actor: str
    rest: str


@dataclass
class PlayResult:
    transcript: list[str] = field(default_factory=list)
    passed: list[str] = field(default_factory=list)
    failed: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failed


def parse_script(text: str) -> list[Step]:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            at_text, channel, actor, *rest = line.split(" ", 3)
            steps.append(Step(datetime.fromisoformat(at_text), channel, actor, rest[0] if rest else ""))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if any(a.at > b.at for a, b in zip(steps, steps[1:])):
        raise ValueError("script steps must be time-ordered")
    return steps


def _frame_for(actor: str, rest: str, sessions: dict[str, str]) -> dict:
    verb, _, args = rest.partition(" ")
    if verb == "join":
        return {"kind": "join", "session": None, "body": {"beneficiary": actor}}
    if verb == "request":
        tokens = args.split()
        body: dict = {"beneficiary": actor, "quota": tokens[0] if tokens else ""}
        items = {}
        for token in tokens[1:]:
            if token.startswith("@"):
                body["merchant"] = token[1:]
            else:
                code, _, qty = token.partition("=")
                items[code] = qty
        if items:
            body["items"] = items
        return {"kind": "request", "session": None, "body": body}
    session = sessions.get(actor)
    if verb == "adjust":
        code, _, qty = args.partition("=")
        return {
            "kind": "adjust",
            "session": session,
            "body": {"merchant": actor, "item_id": code, "actual_qty": qty},
        }
    if verb == "submit":
        return {"kind": "submit", "session": session, "body": {"merchant": actor}}
    if verb == "confirm":
        return {"kind": "confirm", "session": session, "body": {"beneficiary": actor, "pin": args}}
    if verb == "abandon":
        return {"kind": "abandon", "session": session, "body": {"beneficiary": actor}}
    raise ValueError(f"unknown app step {verb!r}")


def _check_assertion(client, rest: str) -> tuple[bool, str]:
    doc = client.state_doc()
    words = rest.split()
    if words[0] == "voucher":
        vid, expr = words[1], words[2]
        expected = expr.split("=", 1)[1]
        got = doc["vouchers"].get(vid, {}).get("state", "<absent>")
        return got == expected, f"voucher {vid} state={got}"
    if words[0] == "balance":
        bid, amount = words[1], words[2]
        got = doc["beneficiaries"].get(bid, {}).get("cash_balance")
        want = Money.parse(amount).piasters
        return got == want, f"balance {bid} {Money(got).render() if got is not None else '<absent>'}"
    if words[0] == "entitlement":
        bid, sid, pi, status = words[1], words[2], words[3], words[4]
        got = doc["entitlements"].get(f"{bid}|{sid}|{pi}", {}).get("status", "<absent>")
        return got == status, f"entitlement {bid} {sid} {pi} {got}"
    raise ValueError(f"unknown assertion {words[0]!r}")


def _record_actions(result: PlayResult, actions: list[dict], sessions: dict[str, str]) -> None:
    for action in actions:
        if action["channel"] == "text":
            result.transcript.append(f"< {action['target']} text {action['body']}")
        else:
            frame = action["frame"]
            if frame.get("session"):
                sessions[action["target"]] = frame["session"]
            result.transcript.append(
                f"< {action['target']} app {json.dumps(frame, sort_keys=True, separators=(',', ':'))}"
            )


def _mobile_of(client, actor: str, cache: dict[str, str]) -> str:
    if actor not in cache:
        for bid, b in client.state_doc()["beneficiaries"].items():
            cache[bid] = b["mobile"]
    return cache.get(actor, actor)


def play(client, steps: list[Step]) -> PlayResult:
    result = PlayResult()
    sessions: dict[str, str] = {}
    mobiles: dict[str, str] = {}
    for step in steps:
        result.transcript.append(f"> {step.at.isoformat()} {step.channel} {step.actor} {step.rest}".rstrip())
        if step.at > client.clock_now():
            _record_actions(result, client.advance_clock(step.at), sessions)
        if step.channel == "text":
            actions = client.send_text(_mobile_of(client, step.actor, mobiles), step.rest)
            _record_actions(result, actions, sessions)
        elif step.channel == "app":
            actions = client.send_frame(_frame_for(step.actor, step.rest, sessions))
            _record_actions(result, actions, sessions)
        elif step.channel == "admin":
            when = datetime.fromisoformat(step.rest.split()[1]) if " " in step.rest else None
            actions = client.run_charging_cycle(step.actor, when)
            _record_actions(result, actions, sessions)
        elif step.channel == "assert":
            ok, got = _check_assertion(client, step.rest)
            mark = "PASS" if ok else "FAIL"
            line = f"= {mark} {step.rest}" + ("" if ok else f" (got: {got})")
            result.transcript.append(line)
            (result.passed if ok else result.failed).append(step.rest)
        else:
            raise ValueError(f"unknown channel {step.channel!r}")
    return result
