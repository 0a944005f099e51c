"""Structural invariants checked over the whole ledger state.

The fuzz harness runs ``check`` after every step; any violation is a bug in
the engine, never in the data.
"""

from __future__ import annotations

from . import delivery
from .money import Money
from .quota import CLAIMED, EXPIRED, OPEN
from .state import State

_VOUCHER_STATES = {delivery.NOT_DELIVERED, delivery.DELIVERED, delivery.CANCELLED}
_ENTITLEMENT_STATES = {OPEN, CLAIMED, EXPIRED}


class InvariantViolation(AssertionError):
    pass


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvariantViolation(message)


def check(state: State, sessions: dict | None = None) -> None:
    for b in state.beneficiaries.values():
        _require(b.cash_balance.piasters >= 0, f"{b.id}: negative balance")

    for key, e in state.entitlements.items():
        _require(e.status in _ENTITLEMENT_STATES, f"{key}: bad status {e.status}")

    live_by_key: dict[tuple, list[str]] = {}
    delivered_by_key: dict[tuple, list[str]] = {}
    for v in state.vouchers.values():
        _require(v.state in _VOUCHER_STATES, f"{v.id}: bad state {v.state}")
        _require(
            (v.closed_at is not None) == (v.state != delivery.NOT_DELIVERED),
            f"{v.id}: closed_at inconsistent with state",
        )
        merchant_total = Money.zero()
        consumer_total = Money.zero()
        seen_items = set()
        for d in v.details:
            _require(d.item_id not in seen_items, f"{v.id}: duplicate item {d.item_id}")
            seen_items.add(d.item_id)
            _require(
                0 <= d.actual_qty.millis <= d.formal_qty.millis,
                f"{v.id}/{d.item_id}: actual outside [0, formal]",
            )
            merchant_total = merchant_total + d.actual_qty.times(d.unit_merchant_price)
            consumer_total = consumer_total + d.actual_qty.times(d.unit_consumer_price)
        _require(
            v.total_merchant_price == merchant_total
            and v.total_consumer_price == consumer_total,
            f"{v.id}: header totals diverge from details",
        )
        key = (v.beneficiary, v.schedule, v.period_index)
        if v.state != delivery.CANCELLED:
            live_by_key.setdefault(key, []).append(v.id)
        if v.state == delivery.DELIVERED:
            delivered_by_key.setdefault(key, []).append(v.id)

    for key, ids in live_by_key.items():
        _require(len(ids) == 1, f"{key}: multiple live vouchers {ids}")
    for key, ids in delivered_by_key.items():
        _require(len(ids) == 1, f"{key}: multiple delivered vouchers {ids}")

    claimed = {
        (e.beneficiary, e.schedule, e.period_index)
        for e in state.entitlements.values()
        if e.status == CLAIMED
    }
    _require(
        claimed == set(live_by_key),
        f"claimed entitlements and live vouchers diverge: {claimed ^ set(live_by_key)}",
    )

    if sessions is not None:
        active = [s for s in sessions.values() if s.phase != "Closed"]
        owners = [s.beneficiary for s in active]
        _require(len(owners) == len(set(owners)), "beneficiary with two active sessions")
        for s in active:
            _require(s.voucher in state.vouchers, f"{s.id}: dangling voucher {s.voucher}")
            _require(
                state.vouchers[s.voucher].state == delivery.NOT_DELIVERED,
                f"{s.id}: active session over closed voucher",
            )
