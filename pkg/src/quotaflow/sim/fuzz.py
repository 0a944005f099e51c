"""Random actor fuzzing: hammer the channels, verify invariants each step.

The generator mixes well-formed traffic with garbage, wrong pins, stale
sessions, and clock jumps; the engine must never crash and the ledger must
satisfy every structural invariant after every single step.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta

from .. import invariants
from ..errors import QuotaflowError
from ..platform import Platform
from .client import LocalClient
from .fixtures import seed_demo

_TEXT_BODIES = [
    "REQ FOOD",
    "REQ FOOD OIL=0",
    "REQ FOOD OIL=0.500 SUGAR=2.000",
    "REQ FOOD SUGAR=9.999",
    "REQ FOOD @M2",
    "REQ FOOD @M3",
    "REQ WINTERBLANKET",
    "REQ NOPE",
    "REQ FOOD OIL=abc",
    "REQ",
    "NO",
    "BAL",
    "OK 0000",
    "HELLO THERE",
    "",
]


def fuzz(seed: int, steps: int, platform: Platform | None = None) -> dict:
    rng = random.Random(seed)
    platform = platform or Platform()
    client = LocalClient(platform)
    manifest = seed_demo(client)
    client.advance_clock(datetime(2024, 1, 2))
    beneficiaries = manifest["beneficiaries"]
    merchants = manifest["merchants"]
    pins = manifest["pins"]
    sessions: dict[str, str] = {}
    summary = {"steps": steps, "errors": {}, "texts": 0, "frames": 0, "advances": 0, "charges": 0}

    def note_actions(actions):
        for action in actions:
            if action["channel"] == "app" and action["frame"].get("session"):
                sessions[action["target"]] = action["frame"]["session"]
            if action["channel"] == "app" and action["frame"]["kind"] == "error":
                code = action["frame"]["body"]["code"]
                summary["errors"][code] = summary["errors"].get(code, 0) + 1
            if action["channel"] == "text" and str(action["body"]).startswith("ERR "):
                code = action["body"][4:]
                summary["errors"][code] = summary["errors"].get(code, 0) + 1

    def random_frame() -> dict:
        b = rng.choice(beneficiaries)
        m = rng.choice(merchants)
        kind = rng.choice(
            ["join", "request", "adjust", "submit", "confirm", "abandon", "noise"]
        )
        if kind == "join":
            return {"kind": "join", "session": None, "body": {"beneficiary": b}}
        if kind == "request":
            body = {"beneficiary": b, "quota": rng.choice(["FOOD", "WINTERBLANKET", "NOPE"])}
            if rng.random() < 0.5:
                body["items"] = {
                    rng.choice(["OIL", "SUGAR", "TEA"]): rng.choice(["0", "0.500", "2.000", "9"])
                }
            if rng.random() < 0.3:
                body["merchant"] = rng.choice(merchants + ["M99"])
            return {"kind": "request", "session": None, "body": body}
        session = sessions.get(m) if rng.random() < 0.8 else "T999"
        if kind == "adjust":
            return {
                "kind": "adjust",
                "session": session,
                "body": {
                    "merchant": m,
                    "item_id": rng.choice(["OIL", "SUGAR", "TEA"]),
                    "actual_qty": rng.choice(["0", "0.250", "1.000", "3.999", "junk"]),
                },
            }
        if kind == "submit":
            return {"kind": "submit", "session": session, "body": {"merchant": m}}
        if kind == "confirm":
            session = sessions.get(rng.choice(merchants)) if rng.random() < 0.7 else None
            pin = pins[b] if rng.random() < 0.6 else "0000"
            return {"kind": "confirm", "session": session, "body": {"beneficiary": b, "pin": pin}}
        if kind == "abandon":
            return {"kind": "abandon", "session": session, "body": {"beneficiary": b}}
        return {"kind": "noise", "session": session, "body": {}}

    def progress_session() -> None:
        # Push one live session forward with a legal move so full
        # deliveries happen, not just error traffic.
        live = [s for s in platform.orchestrator.sessions.values() if s.phase != "Closed"]
        if not live:
            return
        session = rng.choice(live)
        if session.phase == "AwaitMerchantAdjust":
            note_actions(
                client.send_frame(
                    {
                        "kind": "submit",
                        "session": session.id,
                        "body": {"merchant": session.merchant},
                    }
                )
            )
            return
        b = session.beneficiary
        if platform.state.beneficiaries[b].channel_profile == "TextOnly":
            mobile = platform.state.beneficiaries[b].mobile
            note_actions(client.send_text(mobile, f"OK {pins[b]}"))
        else:
            note_actions(
                client.send_frame(
                    {
                        "kind": "confirm",
                        "session": session.id,
                        "body": {"beneficiary": b, "pin": pins[b]},
                    }
                )
            )

    for _ in range(steps):
        roll = rng.random()
        try:
            if roll < 0.30:
                summary["texts"] += 1
                b = rng.choice(beneficiaries)
                mobile = platform.state.beneficiaries[b].mobile
                body = rng.choice(_TEXT_BODIES)
                if body.startswith("OK") and rng.random() < 0.6:
                    body = f"OK {pins[b]}"
                note_actions(client.send_text(mobile, body))
            elif roll < 0.60:
                summary["frames"] += 1
                note_actions(client.send_frame(random_frame()))
            elif roll < 0.75:
                progress_session()
            elif roll < 0.90:
                summary["advances"] += 1
                minutes = rng.choice([1, 5, 16, 45, 120, 600])
                note_actions(client.advance_clock(platform.now + timedelta(minutes=minutes)))
            else:
                summary["charges"] += 1
                note_actions(client.run_charging_cycle(manifest["org_users"]["admin"]))
        except QuotaflowError as exc:
            summary["errors"][exc.code] = summary["errors"].get(exc.code, 0) + 1
        invariants.check(platform.state, platform.orchestrator.sessions)

    client.advance_clock(platform.now + timedelta(days=60))
    invariants.check(platform.state, platform.orchestrator.sessions)
    open_sessions = [
        s.id for s in platform.orchestrator.sessions.values() if s.phase != "Closed"
    ]
    summary["open_sessions"] = open_sessions
    summary["sessions"] = len(platform.orchestrator.sessions)
    summary["vouchers"] = len(platform.state.vouchers)
    summary["delivered"] = sum(
        1 for v in platform.state.vouchers.values() if v.state == "Delivered"
    )
    return summary
