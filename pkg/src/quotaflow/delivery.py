"""Voucher lifecycle: open with formal quantities, adjust, confirm, cancel.

Opening a voucher claims the entitlement and snapshots item prices into the
details, so later item edits cannot change an in-flight delivery. Confirming
computes the receipt and credits the undelivered subsidy value as cash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import TYPE_CHECKING

from .errors import (
    CategoryMismatch,
    DuplicateVoucher,
    NoOpenEntitlement,
    QuantityOutOfRange,
    UnknownBeneficiary,
    UnknownItem,
    UnknownMerchant,
    UnknownQuota,
    UnknownSchedule,
    UnknownVoucher,
    VoucherClosed,
)
from .money import Money, Quantity
from .quota import CLAIMED, OPEN, entitlement_key, period_index, persons_multiplier

if TYPE_CHECKING:
    from .state import State

NOT_DELIVERED = "NotDelivered"
DELIVERED = "Delivered"
CANCELLED = "Cancelled"


@dataclass
class VoucherDetail:
    item_id: str
    formal_qty: Quantity
    actual_qty: Quantity
    unit_merchant_price: Money
    unit_consumer_price: Money
    unit_org_cost: Money


@dataclass
class Voucher:
    id: str
    beneficiary: str
    quota: str
    schedule: str
    period_index: int
    merchant: str
    state: str
    opened_at: datetime
    closed_at: datetime | None
    details: list[VoucherDetail] = field(default_factory=list)
    total_merchant_price: Money = field(default_factory=Money.zero)
    total_consumer_price: Money = field(default_factory=Money.zero)


@dataclass(frozen=True)
class DeliveryReceipt:
    voucher_id: str
    items: tuple[tuple[str, Quantity, Quantity], ...]  # (item_id, formal, actual)
    consumer_due: Money
    refund: Money
    merchant_settlement: Money
    merchant_profit: Money


def subsidy_gap(d: VoucherDetail) -> Money:
    return d.unit_merchant_price - d.unit_consumer_price


def compute_receipt(voucher: Voucher) -> DeliveryReceipt:
    """Receipt as it would read if the voucher were confirmed now.

    Every line value rounds half-up independently before summing, so the
    receipt is a plain integer fold over the details.
    """
    consumer_due = Money.zero()
    refund = Money.zero()
    settlement = Money.zero()
    profit = Money.zero()
    items = []
    for d in voucher.details:
        left = d.formal_qty - d.actual_qty
        consumer_due = consumer_due + d.actual_qty.times(d.unit_consumer_price)
        settlement = settlement + d.actual_qty.times(subsidy_gap(d))
        profit = profit + d.actual_qty.times(d.unit_merchant_price - d.unit_org_cost)
        refund = refund + left.times(subsidy_gap(d))
        items.append((d.item_id, d.formal_qty, d.actual_qty))
    return DeliveryReceipt(
        voucher_id=voucher.id,
        items=tuple(items),
        consumer_due=consumer_due,
        refund=refund,
        merchant_settlement=settlement,
        merchant_profit=profit,
    )


def compute_totals(voucher: Voucher) -> tuple[Money, Money, Money, Money, Money]:
    """(total_merchant_price, total_consumer_price, merchant_profit,
    subsidy_cost, refund_if_confirmed_now), all over actual quantities."""
    merchant_total = Money.zero()
    for d in voucher.details:
        merchant_total = merchant_total + d.actual_qty.times(d.unit_merchant_price)
    r = compute_receipt(voucher)
    subsidy_cost = r.merchant_settlement + r.refund
    return merchant_total, r.consumer_due, r.merchant_profit, subsidy_cost, r.refund


# --- command validation -> event payloads ----------------------------------


def open_voucher_payload(
    state: "State",
    beneficiary: str,
    merchant: str,
    quota: str,
    schedule: str,
    now: datetime,
    requested_items: dict[str, Quantity] | None = None,
) -> dict:
    b = state.beneficiaries.get(beneficiary)
    if b is None:
        raise UnknownBeneficiary(beneficiary)
    m = state.merchants.get(merchant)
    if m is None or not m.registered:
        raise UnknownMerchant(merchant)
    q = state.quotas.get(quota)
    if q is None:
        raise UnknownQuota(quota)
    sched = state.schedules.get(schedule)
    if sched is None or sched.quota != quota:
        raise UnknownSchedule(schedule)
    if q.category not in m.categories:
        raise CategoryMismatch(f"merchant {merchant} does not serve {q.category}")
    pi = period_index(sched, now.date())
    if pi is not None and any(
        v.state != CANCELLED
        and (v.beneficiary, v.schedule, v.period_index) == (beneficiary, schedule, pi)
        for v in state.vouchers.values()
    ):
        raise DuplicateVoucher(f"{beneficiary} already holds a voucher for this period")
    ent = state.entitlements.get(entitlement_key(beneficiary, schedule, pi)) if pi is not None else None
    if ent is None or ent.status != OPEN:
        raise NoOpenEntitlement(f"{beneficiary} has nothing open on {schedule}")
    mult = persons_multiplier(q, sched, b.family_size)
    unmatched = dict(requested_items or {})
    details = []
    for item in state.items.get(schedule, []):
        formal = item.qty_per_person.scale(mult)
        actual = unmatched.pop(item.item_id, formal)
        if actual > formal:
            raise QuantityOutOfRange(
                f"{item.item_id}: requested {actual} exceeds entitled {formal}"
            )
        details.append(
            {
                "item_id": item.item_id,
                "formal_qty": formal.millis,
                "actual_qty": actual.millis,
                "unit_merchant_price": item.unit_merchant_price.piasters,
                "unit_consumer_price": item.unit_consumer_price.piasters,
                "unit_org_cost": item.unit_org_cost.piasters,
            }
        )
    if unmatched:
        raise UnknownItem(", ".join(sorted(unmatched)))
    return {
        "id": state.next_id("V"),
        "beneficiary": beneficiary,
        "quota": quota,
        "schedule": schedule,
        "period_index": pi,
        "merchant": merchant,
        "details": details,
    }


def _open_voucher(state: "State", voucher_id: str) -> Voucher:
    v = state.vouchers.get(voucher_id)
    if v is None:
        raise UnknownVoucher(voucher_id)
    if v.state != NOT_DELIVERED:
        raise VoucherClosed(f"{voucher_id} is {v.state}")
    return v


def update_qty_payload(state: "State", voucher: str, item_id: str, actual_qty: Quantity) -> dict:
    v = _open_voucher(state, voucher)
    detail = next((d for d in v.details if d.item_id == item_id), None)
    if detail is None:
        raise UnknownItem(item_id)
    if actual_qty > detail.formal_qty:
        raise QuantityOutOfRange(
            f"{item_id}: {actual_qty} exceeds formal {detail.formal_qty}"
        )
    return {"voucher": voucher, "item_id": item_id, "actual_qty": actual_qty.millis}


def confirm_decisions(state: "State", voucher: str) -> list[tuple[str, dict]]:
    v = _open_voucher(state, voucher)
    r = compute_receipt(v)
    events: list[tuple[str, dict]] = [
        (
            "DeliveryConfirmed",
            {
                "voucher": v.id,
                "items": [
                    {"item_id": i, "formal_qty": f.millis, "actual_qty": a.millis}
                    for i, f, a in r.items
                ],
                "consumer_due": r.consumer_due.piasters,
                "refund": r.refund.piasters,
                "merchant_settlement": r.merchant_settlement.piasters,
                "merchant_profit": r.merchant_profit.piasters,
            },
        )
    ]
    if r.refund.piasters:
        events.append(
            (
                "BalanceCredited",
                {"beneficiary": v.beneficiary, "amount": r.refund.piasters, "voucher": v.id},
            )
        )
    return events


def cancel_voucher_payload(state: "State", voucher: str, reason: str) -> dict:
    v = _open_voucher(state, voucher)
    return {"voucher": v.id, "reason": reason}


# --- event application -----------------------------------------------------


def _refresh_totals(v: Voucher) -> None:
    merchant_total = Money.zero()
    consumer_total = Money.zero()
    for d in v.details:
        merchant_total = merchant_total + d.actual_qty.times(d.unit_merchant_price)
        consumer_total = consumer_total + d.actual_qty.times(d.unit_consumer_price)
    v.total_merchant_price = merchant_total
    v.total_consumer_price = consumer_total


def apply_voucher_opened(state: "State", p: dict, at: datetime) -> None:
    v = Voucher(
        id=p["id"],
        beneficiary=p["beneficiary"],
        quota=p["quota"],
        schedule=p["schedule"],
        period_index=p["period_index"],
        merchant=p["merchant"],
        state=NOT_DELIVERED,
        opened_at=at,
        closed_at=None,
        details=[
            VoucherDetail(
                item_id=d["item_id"],
                formal_qty=Quantity(d["formal_qty"]),
                actual_qty=Quantity(d["actual_qty"]),
                unit_merchant_price=Money(d["unit_merchant_price"]),
                unit_consumer_price=Money(d["unit_consumer_price"]),
                unit_org_cost=Money(d["unit_org_cost"]),
            )
            for d in p["details"]
        ],
    )
    _refresh_totals(v)
    state.vouchers[v.id] = v
    key = entitlement_key(v.beneficiary, v.schedule, v.period_index)
    state.entitlements[key].status = CLAIMED


def apply_qty_updated(state: "State", p: dict) -> None:
    v = state.vouchers[p["voucher"]]
    for d in v.details:
        if d.item_id == p["item_id"]:
            d.actual_qty = Quantity(p["actual_qty"])
    _refresh_totals(v)


def apply_delivery_confirmed(state: "State", p: dict, at: datetime) -> None:
    v = state.vouchers[p["voucher"]]
    v.state = DELIVERED
    v.closed_at = at


def apply_voucher_cancelled(state: "State", p: dict, at: datetime) -> None:
    v = state.vouchers[p["voucher"]]
    v.state = CANCELLED
    v.closed_at = at
    key = entitlement_key(v.beneficiary, v.schedule, v.period_index)
    ent = state.entitlements.get(key)
    if ent is not None:
        ent.status = OPEN
