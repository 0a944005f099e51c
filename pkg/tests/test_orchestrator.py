"""Session orchestration over both channel combinations.

Each test drives the platform through its public channel entrypoints only
(text bodies and app frames) and asserts on the outbound traffic plus the
resulting ledger state.
"""

from datetime import datetime, timedelta

import pytest

from quotaflow.money import Money
from quotaflow.orchestrator import SESSION_TIMEOUT, SHORT_CODES, select_scenario
from quotaflow.quota import entitlement_key

from conftest import frames, make_world, texts

T0 = datetime(2024, 1, 3, 9, 0)


def submit(platform, merchant, session="T1"):
    return platform.handle_frame({"kind": "submit", "session": session, "body": {"merchant": merchant}})


def adjust(platform, merchant, item, qty, session="T1"):
    return platform.handle_frame(
        {
            "kind": "adjust",
            "session": session,
            "body": {"merchant": merchant, "item_id": item, "actual_qty": qty},
        }
    )


# --- roadmap: text beneficiary, app merchant --------------------------------


def test_text_flow_end_to_end(world):
    platform = world.platform
    out = platform.handle_text(world.mobile, "REQ FOOD OIL=0")
    (draft,) = frames(out)
    assert draft["kind"] == "draft" and draft["session"] == "T1"
    assert draft["body"]["voucher"] == "V1"
    assert draft["body"]["refund"] == "6.00"

    out = submit(platform, world.merchant)
    assert texts(out) == ["CONFIRM V1 PAY 40.00 REFUND 6.00 REPLY OK PIN"]

    out = platform.handle_text(world.mobile, "OK 4821")
    assert texts(out) == ["DONE V1 SUGAR=4.000 REFUND 6.00"]
    (receipt,) = frames(out)
    assert receipt["kind"] == "receipt"
    assert receipt["body"]["merchant_settlement"] == "8.00"
    assert receipt["body"]["merchant_profit"] == "6.00"

    assert platform.state.vouchers["V1"].state == "Delivered"
    assert platform.state.beneficiaries[world.ben].cash_balance == Money(600)
    session = platform.orchestrator.sessions["T1"]
    assert session.phase == "Closed" and session.outcome == "Delivered"


def test_app_flow_end_to_end(platform):
    world = make_world(platform, profile="AppCapable", family_size=3)
    out = platform.handle_frame(
        {
            "kind": "request",
            "session": None,
            "body": {"beneficiary": world.ben, "quota": "FOOD", "items": {"OIL": "1.000"}},
        }
    )
    (draft,) = frames(out)
    assert draft["kind"] == "draft"
    assert {i["item_id"]: i["actual_qty"] for i in draft["body"]["items"]} == {
        "OIL": "1.000",
        "SUGAR": "3.000",
    }

    adjust(platform, world.merchant, "OIL", "0.500")
    out = submit(platform, world.merchant)
    (ask,) = frames(out)
    assert ask["kind"] == "confirm_request" and ask["body"]["consumer_due"] == "43.50"

    out = platform.handle_frame(
        {"kind": "confirm", "session": "T1", "body": {"beneficiary": world.ben, "pin": "4821"}}
    )
    kinds = [f["kind"] for f in frames(out)]
    assert kinds == ["receipt", "receipt"]  # beneficiary copy + merchant copy
    assert platform.state.beneficiaries[world.ben].cash_balance == Money(300)


def test_scenario_selection():
    assert select_scenario("TextOnly", "AppCapable") == "TextBeneficiary_AppMerchant"
    assert select_scenario("AppCapable", "AppCapable") == "AppBeneficiary_AppMerchant"


# --- guards ------------------------------------------------------------------


def test_unknown_sender_gets_error_text(world):
    out = world.platform.handle_text("+209999999999", "REQ FOOD")
    assert texts(out) == ["ERR UNKNOWN_SENDER"]


def test_channel_must_match_profile(platform):
    world = make_world(platform, profile="AppCapable")
    out = platform.handle_text(world.mobile, "REQ FOOD")
    assert texts(out) == ["ERR CHANNEL"]
    # and the text-only sibling cannot use frames
    other = platform.register_beneficiary(
        world.admin,
        national_id="29001011234599",
        pin="1111",
        address="x",
        region=platform.state.merchants[world.merchant].region,
        mobile="+201000000199",
        family_size=1,
        preferred_merchant=world.merchant,
        channel_profile="TextOnly",
    )
    platform.run_charging_cycle(world.admin)
    out = platform.handle_frame(
        {"kind": "request", "session": None, "body": {"beneficiary": other, "quota": "FOOD"}}
    )
    (err,) = frames(out)
    assert err["kind"] == "error" and err["body"]["code"] == "CHANNEL"


def test_balance_query_is_stateless(world):
    platform = world.platform
    assert texts(platform.handle_text(world.mobile, "BAL")) == ["BALANCE 0.00"]
    platform.handle_text(world.mobile, "REQ FOOD")
    # mid-session BAL answers without disturbing the session
    assert texts(platform.handle_text(world.mobile, "BAL")) == ["BALANCE 0.00"]
    assert platform.orchestrator.sessions["T1"].phase == "AwaitMerchantAdjust"


def test_one_active_session_per_beneficiary(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    out = platform.handle_text(world.mobile, "REQ FOOD")
    assert texts(out) == ["ERR SESSION_ACTIVE"]


def test_merchant_resolution_order(platform):
    world = make_world(platform, profile="TextOnly")
    from quotaflow.registry import Region

    m2 = platform.register_merchant(world.admin, "Outlet B", Region("urban", "Cairo"), {"food"})
    # explicit code wins over the preferred merchant
    out = platform.handle_text(world.mobile, f"REQ FOOD @{m2}")
    (draft,) = frames(out)
    assert draft["body"]["merchant"] == m2
    platform.handle_text(world.mobile, "NO")
    # unknown explicit code refused
    assert texts(platform.handle_text(world.mobile, "REQ FOOD @M99")) == ["ERR UNKNOWN_MERCHANT"]
    # no preference and no code: refused
    loner = platform.register_beneficiary(
        world.admin,
        national_id="29001011234588",
        pin="2222",
        address="x",
        region=Region("urban", "Cairo"),
        mobile="+201000000188",
        family_size=2,
        preferred_merchant=None,
        channel_profile="TextOnly",
    )
    platform.run_charging_cycle(world.admin)
    assert texts(platform.handle_text("+201000000188", "REQ FOOD")) == ["ERR UNKNOWN_MERCHANT"]


def test_request_against_unknown_quota_or_out_of_window(world):
    platform = world.platform
    assert texts(platform.handle_text(world.mobile, "REQ BREAD")) == ["ERR UNKNOWN_QUOTA"]


def test_phase_violations_are_reported(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    # beneficiary cannot confirm before the merchant submits
    assert texts(platform.handle_text(world.mobile, "OK 4821")) == ["ERR PHASE"]
    submit(platform, world.merchant)
    # merchant cannot adjust after submitting
    out = adjust(platform, world.merchant, "OIL", "1.000")
    (err,) = frames(out)
    assert err["body"]["code"] == "PHASE"


def test_ok_and_no_require_a_session(world):
    platform = world.platform
    assert texts(platform.handle_text(world.mobile, "OK 4821")) == ["ERR NO_SESSION"]
    assert texts(platform.handle_text(world.mobile, "NO")) == ["ERR NO_SESSION"]
    out = submit(platform, world.merchant, session="T77")
    (err,) = frames(out)
    assert err["body"]["code"] == "NO_SESSION"


# --- pin handling -------------------------------------------------------------


def test_three_pin_failures_cancel_the_voucher(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    submit(platform, world.merchant)
    assert texts(platform.handle_text(world.mobile, "OK 0000")) == ["ERR BAD_PIN"]
    assert texts(platform.handle_text(world.mobile, "OK 1111")) == ["ERR BAD_PIN"]
    out = platform.handle_text(world.mobile, "OK 2222")
    assert "CANCELLED V1" in texts(out)
    assert platform.state.vouchers["V1"].state == "Cancelled"
    assert platform.orchestrator.sessions["T1"].outcome == "Failed"
    assert platform.state.entitlements[entitlement_key(world.ben, world.schedule, 0)].status == "Open"


def test_pin_failures_reset_per_session(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    submit(platform, world.merchant)
    platform.handle_text(world.mobile, "OK 0000")
    platform.handle_text(world.mobile, "OK 0000")
    out = platform.handle_text(world.mobile, "OK 4821")  # third try, correct
    assert any(t.startswith("DONE V1") for t in texts(out))
    assert platform.state.vouchers["V1"].state == "Delivered"


# --- abandonment and timeout --------------------------------------------------


def test_abandon_cancels_and_reopens_entitlement(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    out = platform.handle_text(world.mobile, "NO")
    assert "CANCELLED V1" in texts(out)
    (cancelled,) = frames(out)
    assert cancelled["kind"] == "cancelled" and cancelled["body"]["reason"] == "abandoned"
    assert platform.orchestrator.sessions["T1"].outcome == "Abandoned"
    key = entitlement_key(world.ben, world.schedule, 0)
    assert platform.state.entitlements[key].status == "Open"
    # a fresh request may follow immediately
    assert frames(platform.handle_text(world.mobile, "REQ FOOD"))[0]["kind"] == "draft"


def test_session_times_out(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    out = platform.advance_clock(T0 + SESSION_TIMEOUT + timedelta(seconds=1))
    assert "CANCELLED V1" in texts(out)
    session = platform.orchestrator.sessions["T1"]
    assert session.outcome == "TimedOut"
    assert platform.state.vouchers["V1"].state == "Cancelled"


def test_activity_resets_the_deadline(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    platform.advance_clock(T0 + timedelta(minutes=10))
    adjust(platform, world.merchant, "OIL", "1.500")
    # 10 + 10 minutes: past the original deadline, inside the refreshed one
    platform.advance_clock(T0 + timedelta(minutes=20))
    assert platform.orchestrator.sessions["T1"].phase == "AwaitMerchantAdjust"
    submit(platform, world.merchant)
    out = platform.handle_text(world.mobile, "OK 4821")
    assert platform.state.vouchers["V1"].state == "Delivered"
    assert any(t.startswith("DONE") for t in texts(out))


def test_timeout_applies_lazily_on_next_message(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    # no clock advance call: the next inbound message observes a later now
    platform.orchestrator.sessions["T1"].deadline = T0 - timedelta(seconds=1)
    out = platform.handle_text(world.mobile, "OK 4821")
    assert "CANCELLED V1" in texts(out)
    assert texts(out)[-1] == "ERR NO_SESSION"


# --- app extras ----------------------------------------------------------------


def test_join_returns_catalog_and_balance(platform):
    world = make_world(platform, profile="AppCapable")
    out = platform.handle_frame(
        {"kind": "join", "session": None, "body": {"beneficiary": world.ben}}
    )
    (catalog,) = frames(out)
    assert catalog["kind"] == "catalog"
    assert catalog["body"]["cash_balance"] == "0.00"
    assert [s["schedule"] for s in catalog["body"]["schedules"]] == [world.schedule]
    assert catalog["body"]["entitlements"] == [
        {"schedule": world.schedule, "period_index": 0, "status": "Open"}
    ]


def test_join_refused_for_text_only(world):
    out = world.platform.handle_frame(
        {"kind": "join", "session": None, "body": {"beneficiary": world.ben}}
    )
    (err,) = frames(out)
    assert err["body"]["code"] == "NOT_APP"


def test_unknown_frame_kind(world):
    # rejected before any session lookup
    out = world.platform.handle_frame({"kind": "noise", "session": None, "body": {}})
    (err,) = frames(out)
    assert err["kind"] == "error" and err["body"]["code"] == "PARSE"
    out = world.platform.handle_frame({"kind": "noise", "session": "T99", "body": {}})
    (err,) = frames(out)
    assert err["body"]["code"] == "PARSE"


def test_adjust_with_malformed_quantity(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    out = adjust(platform, world.merchant, "OIL", "junk")
    (err,) = frames(out)
    assert err["body"]["code"] == "INVALID"
    # session survives a bad adjust
    assert platform.orchestrator.sessions["T1"].phase == "AwaitMerchantAdjust"


def test_every_error_code_is_mapped():
    # the short-code table stays total over the errors the channels can raise
    assert set(SHORT_CODES.values()) >= {
        "PARSE",
        "BAD_PIN",
        "NO_ENTITLEMENT",
        "DUPLICATE",
        "UNKNOWN_QUOTA",
        "UNKNOWN_MERCHANT",
        "UNKNOWN_SENDER",
        "CATEGORY",
        "QTY_RANGE",
        "PHASE",
        "NO_SESSION",
        "SESSION_ACTIVE",
        "NOT_APP",
        "CHANNEL",
    }


def test_notifications_route_by_profile(platform):
    world = make_world(platform, profile="AppCapable", advance_to=None)
    out = platform.advance_clock(datetime(2024, 1, 1))
    (charged,) = frames(out)
    assert charged["kind"] == "charged" and charged["body"] == {
        "quota": "FOOD",
        "period_index": 0,
    }
    assert texts(out) == []
