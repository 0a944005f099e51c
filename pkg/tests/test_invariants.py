"""The structural checks must accept a healthy ledger and flag corrupted copies.

Each test clones a real post-delivery state, breaks exactly one rule by hand,
and expects the checker to name it.
"""

from types import SimpleNamespace

import pytest

from conftest import make_world
from quotaflow.delivery import Voucher
from quotaflow.invariants import InvariantViolation, check
from quotaflow.money import Money, Quantity
from quotaflow.platform import Platform
from quotaflow.state import State


@pytest.fixture(scope="module")
def healthy():
    w = make_world(Platform())
    w.platform.handle_text(w.mobile, "REQ FOOD OIL=0")
    w.platform.handle_frame(
        {"kind": "submit", "session": "T1", "body": {"merchant": w.merchant}}
    )
    w.platform.handle_text(w.mobile, f"OK {w.pin}")
    return w


def _copy(state: State) -> State:
    return State.from_canonical(state.canonical())


def test_healthy_state_passes(healthy):
    check(healthy.platform.state, healthy.platform.orchestrator.sessions)


def test_negative_balance(healthy):
    s = _copy(healthy.platform.state)
    s.beneficiaries[healthy.ben].cash_balance = Money(-1)
    with pytest.raises(InvariantViolation, match="negative balance"):
        check(s)


def test_unknown_entitlement_status(healthy):
    s = _copy(healthy.platform.state)
    next(iter(s.entitlements.values())).status = "Limbo"
    with pytest.raises(InvariantViolation, match="bad status"):
        check(s)


def test_unknown_voucher_state(healthy):
    s = _copy(healthy.platform.state)
    s.vouchers["V1"].state = "Limbo"
    with pytest.raises(InvariantViolation, match="bad state"):
        check(s)


def test_closed_voucher_without_timestamp(healthy):
    s = _copy(healthy.platform.state)
    s.vouchers["V1"].closed_at = None
    with pytest.raises(InvariantViolation, match="closed_at"):
        check(s)


def test_duplicate_detail_row(healthy):
    s = _copy(healthy.platform.state)
    v = s.vouchers["V1"]
    v.details.append(v.details[0])
    with pytest.raises(InvariantViolation, match="duplicate item"):
        check(s)


def test_actual_above_formal(healthy):
    s = _copy(healthy.platform.state)
    d = s.vouchers["V1"].details[-1]
    d.actual_qty = Quantity(d.formal_qty.millis + 1)
    with pytest.raises(InvariantViolation, match="actual outside"):
        check(s)


def test_header_totals_must_match_details(healthy):
    s = _copy(healthy.platform.state)
    v = s.vouchers["V1"]
    v.total_merchant_price = v.total_merchant_price + Money(1)
    with pytest.raises(InvariantViolation, match="header totals"):
        check(s)


def test_two_live_vouchers_for_one_entitlement(healthy):
    s = _copy(healthy.platform.state)
    twin = Voucher(**{**vars(s.vouchers["V1"]), "id": "V2"})
    s.vouchers["V2"] = twin
    with pytest.raises(InvariantViolation, match="multiple"):
        check(s)


def test_claimed_entitlement_needs_live_voucher(healthy):
    s = _copy(healthy.platform.state)
    s.vouchers["V1"].state = "Cancelled"  # entitlement still says Claimed
    with pytest.raises(InvariantViolation, match="diverge"):
        check(s)


def _session(sid, beneficiary, voucher, phase="AwaitBeneficiaryConfirm"):
    return SimpleNamespace(id=sid, beneficiary=beneficiary, voucher=voucher, phase=phase)


def test_one_active_session_per_beneficiary(healthy):
    s = healthy.platform.state
    sessions = {
        "T8": _session("T8", healthy.ben, "V1"),
        "T9": _session("T9", healthy.ben, "V1"),
    }
    with pytest.raises(InvariantViolation, match="two active sessions"):
        check(s, sessions)


def test_session_must_point_at_a_voucher(healthy):
    s = healthy.platform.state
    with pytest.raises(InvariantViolation, match="dangling voucher"):
        check(s, {"T8": _session("T8", healthy.ben, "V99")})


def test_session_over_closed_voucher(healthy):
    # V1 is Delivered in the healthy fixture, so an active session on it
    # is stale by definition.
    s = healthy.platform.state
    with pytest.raises(InvariantViolation, match="closed voucher"):
        check(s, {"T8": _session("T8", healthy.ben, "V1")})


def test_closed_sessions_are_ignored(healthy):
    s = healthy.platform.state
    check(s, {"T8": _session("T8", healthy.ben, "V1", phase="Closed")})
