"""Quota definitions, distribution calendars, and the charging cycle.

A quota is a named package an organization offers; a schedule fixes its
periodicity and validity window; items fix per-person quantities and the
three unit prices. The charging cycle turns (schedule, period) pairs into
Open entitlements for every registered beneficiary, exactly once each.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from typing import TYPE_CHECKING

from .errors import (
    InvalidDateRange,
    ItemLockedForPeriod,
    UnknownQuota,
    UnknownSchedule,
    ValidationError,
)
from .money import Money, Quantity

if TYPE_CHECKING:
    from .state import State

PERSONAL = "Personal"
FAMILY = "Family"
BASES = frozenset({PERSONAL, FAMILY})

ONCE = "Once"
DAILY = "Daily"
WEEKLY = "Weekly"
MONTHLY = "Monthly"
YEARLY = "Yearly"
PERIODICITIES = frozenset({ONCE, DAILY, WEEKLY, MONTHLY, YEARLY})

OPEN = "Open"
CLAIMED = "Claimed"
EXPIRED = "Expired"

_CODE_STRIP = re.compile(r"[^A-Z0-9]")


def code_from_name(name: str) -> str:
    """Stable short code used in text commands: uppercase alphanumerics."""
    code = _CODE_STRIP.sub("", name.upper())
    if not code:
        raise ValidationError(f"name {name!r} yields no usable code")
    return code


@dataclass
class Quota:
    id: str
    org: str
    code: str
    name: str
    basis: str  # Personal | Family
    notify_on_charge: bool
    category: str = "food"


@dataclass
class QuotaSchedule:
    id: str
    quota: str
    periodicity: str
    valid_from: date
    valid_to: date
    max_persons: int | None


@dataclass(frozen=True)
class QuotaItem:
    item_id: str
    schedule: str
    name: str
    unit: str
    qty_per_person: Quantity
    unit_merchant_price: Money
    unit_consumer_price: Money
    unit_org_cost: Money


@dataclass
class Entitlement:
    beneficiary: str
    schedule: str
    period_index: int
    charged_at: datetime
    status: str = OPEN


def entitlement_key(beneficiary: str, schedule: str, period_index: int) -> str:
    return f"{beneficiary}|{schedule}|{period_index}"


# --- calendar arithmetic ----------------------------------------------------


def period_index(schedule: QuotaSchedule, on: date) -> int | None:
    """Zero-based period for a date, or None outside the validity window."""
    if on < schedule.valid_from or on > schedule.valid_to:
        return None
    kind = schedule.periodicity
    if kind == ONCE:
        return 0
    if kind == DAILY:
        return (on - schedule.valid_from).days
    if kind == WEEKLY:
        return (on - schedule.valid_from).days // 7
    if kind == MONTHLY:
        return (on.year - schedule.valid_from.year) * 12 + (on.month - schedule.valid_from.month)
    if kind == YEARLY:
        return on.year - schedule.valid_from.year
    raise ValidationError(f"unknown periodicity {kind!r}")


def period_starts(schedule: QuotaSchedule) -> list[date]:
    """First in-window date of every period, ascending."""
    vf, vt = schedule.valid_from, schedule.valid_to
    kind = schedule.periodicity
    if kind == ONCE:
        return [vf]
    if kind == DAILY:
        return [vf + timedelta(days=n) for n in range((vt - vf).days + 1)]
    if kind == WEEKLY:
        return [vf + timedelta(days=7 * n) for n in range((vt - vf).days // 7 + 1)]
    starts = [vf]
    if kind == MONTHLY:
        y, m = vf.year, vf.month
        while True:
            y, m = (y + 1, 1) if m == 12 else (y, m + 1)
            first = date(y, m, 1)
            if first > vt:
                return starts
            starts.append(first)
    if kind == YEARLY:
        y = vf.year
        while True:
            y += 1
            first = date(y, 1, 1)
            if first > vt:
                return starts
            starts.append(first)
    raise ValidationError(f"unknown periodicity {kind!r}")


def cycle_boundaries(schedule: QuotaSchedule, after: datetime, upto: datetime) -> list[datetime]:
    """Instants in (after, upto] at which this schedule needs a charging pass.

    One per period start plus one just past the window end, so stale
    entitlements expire even when no new period begins.
    """
    marks = [datetime.combine(d, time.min) for d in period_starts(schedule)]
    marks.append(datetime.combine(schedule.valid_to + timedelta(days=1), time.min))
    return [m for m in marks if after < m <= upto]


def persons_multiplier(quota: Quota, schedule: QuotaSchedule, family_size: int | None) -> int:
    if quota.basis == PERSONAL:
        return 1
    persons = family_size if isinstance(family_size, int) and family_size >= 1 else 1
    if schedule.max_persons is not None:
        persons = min(persons, schedule.max_persons)
    return persons


def entitled_qty(item: QuotaItem, multiplier: int) -> Quantity:
    return item.qty_per_person.scale(multiplier)


# --- command validation -> event payloads ----------------------------------


def define_quota_payload(
    state: "State",
    org: str,
    name: str,
    basis: str,
    notify_on_charge: bool,
    category: str = "food",
) -> dict:
    if basis not in BASES:
        raise ValidationError(f"basis must be Personal or Family, got {basis!r}")
    code = code_from_name(name)
    if any(q.code == code for q in state.quotas.values()):
        raise ValidationError(f"quota code {code} already in use")
    return {
        "id": state.next_id("Q"),
        "org": org,
        "code": code,
        "name": name,
        "basis": basis,
        "notify_on_charge": notify_on_charge,
        "category": category,
    }


def define_schedule_payload(
    state: "State",
    quota: str,
    periodicity: str,
    valid_from: date,
    valid_to: date,
    max_persons: int | None,
) -> dict:
    if quota not in state.quotas:
        raise UnknownQuota(quota)
    if periodicity not in PERIODICITIES:
        raise ValidationError(f"unknown periodicity {periodicity!r}")
    if valid_to < valid_from:
        raise InvalidDateRange(f"valid_to {valid_to} precedes valid_from {valid_from}")
    if max_persons is not None and max_persons < 1:
        raise ValidationError("max_persons must be >= 1")
    return {
        "id": state.next_id("S"),
        "quota": quota,
        "periodicity": periodicity,
        "valid_from": valid_from.isoformat(),
        "valid_to": valid_to.isoformat(),
        "max_persons": max_persons,
    }


def _parse_qty(text: str) -> Quantity:
    try:
        return Quantity.parse(text)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _parse_money(text: str) -> Money:
    try:
        return Money.parse(text)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def set_items_payload(state: "State", schedule: str, item_specs: list[dict], now: datetime) -> dict:
    sched = state.schedules.get(schedule)
    if sched is None:
        raise UnknownSchedule(schedule)
    pi = period_index(sched, now.date())
    if pi is not None and any(
        e.schedule == schedule and e.period_index == pi and e.status == OPEN
        for e in state.entitlements.values()
    ):
        raise ItemLockedForPeriod(
            f"schedule {schedule} has open entitlements for period {pi}"
        )
    items, seen = [], set()
    for spec in item_specs:
        code = code_from_name(spec["name"])
        if code in seen:
            raise ValidationError(f"duplicate item {code}")
        seen.add(code)
        qty = _parse_qty(str(spec["qty_per_person"]))
        merch = _parse_money(str(spec["unit_merchant_price"]))
        cons = _parse_money(str(spec["unit_consumer_price"]))
        org_cost = _parse_money(str(spec["unit_org_cost"]))
        if qty.millis <= 0:
            raise ValidationError(f"item {code}: qty_per_person must be positive")
        if min(merch.piasters, cons.piasters, org_cost.piasters) < 0:
            raise ValidationError(f"item {code}: prices must be >= 0")
        if merch < cons:
            raise ValidationError(
                f"item {code}: consumer price exceeds merchant price"
            )
        items.append(
            {
                "item_id": code,
                "name": spec["name"],
                "unit": spec["unit"],
                "qty_per_person": qty.millis,
                "unit_merchant_price": merch.piasters,
                "unit_consumer_price": cons.piasters,
                "unit_org_cost": org_cost.piasters,
            }
        )
    return {"schedule": schedule, "items": items}


# --- charging cycle ---------------------------------------------------------


@dataclass
class ChargeReport:
    at: datetime
    created: list[tuple[str, str, int]] = field(default_factory=list)
    expired: list[tuple[str, str, int]] = field(default_factory=list)
    notified: list[tuple[str, str, int]] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)


def charge_decisions(state: "State", now: datetime) -> tuple[list[tuple[str, dict]], ChargeReport]:
    """Events a charging pass at ``now`` must append: expiries, then charges.

    Idempotent by construction — an entitlement key is charged at most once,
    so a second pass at the same instant decides nothing.
    """
    report = ChargeReport(at=now)
    events: list[tuple[str, dict]] = []
    today = now.date()
    for sid in sorted(state.schedules):
        sched = state.schedules[sid]
        pi = period_index(sched, today)
        for key in sorted(state.entitlements):
            ent = state.entitlements[key]
            if ent.schedule != sid or ent.status != OPEN:
                continue
            if pi is None or ent.period_index < pi:
                events.append(
                    (
                        "EntitlementExpired",
                        {
                            "beneficiary": ent.beneficiary,
                            "schedule": sid,
                            "period_index": ent.period_index,
                        },
                    )
                )
                report.expired.append((ent.beneficiary, sid, ent.period_index))
        if pi is None:
            continue
        if not state.items.get(sid):
            report.skipped.append(f"{sid}: no items defined")
            continue
        quota = state.quotas[sched.quota]
        for bid in sorted(state.beneficiaries):
            if entitlement_key(bid, sid, pi) in state.entitlements:
                continue
            events.append(
                (
                    "EntitlementCharged",
                    {"beneficiary": bid, "schedule": sid, "period_index": pi},
                )
            )
            report.created.append((bid, sid, pi))
            if quota.notify_on_charge:
                report.notified.append((bid, sid, pi))
    return events, report


def apply_quota_defined(state: "State", p: dict) -> None:
    state.quotas[p["id"]] = Quota(
        id=p["id"],
        org=p["org"],
        code=p["code"],
        name=p["name"],
        basis=p["basis"],
        notify_on_charge=p["notify_on_charge"],
        category=p.get("category", "food"),
    )


def apply_schedule_defined(state: "State", p: dict) -> None:
    state.schedules[p["id"]] = QuotaSchedule(
        id=p["id"],
        quota=p["quota"],
        periodicity=p["periodicity"],
        valid_from=date.fromisoformat(p["valid_from"]),
        valid_to=date.fromisoformat(p["valid_to"]),
        max_persons=p["max_persons"],
    )


def apply_items_set(state: "State", p: dict) -> None:
    state.items[p["schedule"]] = [
        QuotaItem(
            item_id=i["item_id"],
            schedule=p["schedule"],
            name=i["name"],
            unit=i["unit"],
            qty_per_person=Quantity(i["qty_per_person"]),
            unit_merchant_price=Money(i["unit_merchant_price"]),
            unit_consumer_price=Money(i["unit_consumer_price"]),
            unit_org_cost=Money(i["unit_org_cost"]),
        )
        for i in p["items"]
    ]


def apply_entitlement_charged(state: "State", p: dict, at: datetime) -> None:
    key = entitlement_key(p["beneficiary"], p["schedule"], p["period_index"])
    state.entitlements[key] = Entitlement(
        beneficiary=p["beneficiary"],
        schedule=p["schedule"],
        period_index=p["period_index"],
        charged_at=at,
    )


def apply_entitlement_expired(state: "State", p: dict) -> None:
    key = entitlement_key(p["beneficiary"], p["schedule"], p["period_index"])
    state.entitlements[key].status = EXPIRED


# --- queries ----------------------------------------------------------------


@dataclass(frozen=True)
class ItemAvailability:
    item_id: str
    name: str
    unit: str
    entitled_qty: Quantity
    unit_merchant_price: Money
    unit_consumer_price: Money
    status: str


def query_quota(
    state: "State", beneficiary: str, quota: str, schedule: str, now: datetime
) -> tuple[bool, str, list[ItemAvailability]]:
    """Available items for one beneficiary and schedule.

    Failures come back as (False, reason, []) rather than exceptions.
    """
    b = state.beneficiaries.get(beneficiary)
    if b is None:
        return False, "UnknownBeneficiary", []
    q = state.quotas.get(quota)
    sched = state.schedules.get(schedule)
    if q is None or sched is None or sched.quota != q.id:
        return False, "UnknownQuota", []
    pi = period_index(sched, now.date())
    if pi is None:
        return False, "OutOfWindow", []
    ent = state.entitlements.get(entitlement_key(beneficiary, schedule, pi))
    if ent is None or ent.status != OPEN:
        return False, "NoOpenEntitlement", []
    mult = persons_multiplier(q, sched, b.family_size)
    rows = [
        ItemAvailability(
            item_id=i.item_id,
            name=i.name,
            unit=i.unit,
            entitled_qty=entitled_qty(i, mult),
            unit_merchant_price=i.unit_merchant_price,
            unit_consumer_price=i.unit_consumer_price,
            status=ent.status,
        )
        for i in state.items.get(schedule, [])
    ]
    return True, "", rows
