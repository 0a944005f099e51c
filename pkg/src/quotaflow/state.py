"""The full in-memory ledger state and its canonical serialization.

State is only ever mutated by applying events; identifiers are derived from
current contents so that replaying a journal regenerates them identically.
Canonical form is key-sorted JSON with money/quantities as plain integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date, datetime

from .delivery import Voucher, VoucherDetail
from .money import Money, Quantity
from .quota import Entitlement, Quota, QuotaItem, QuotaSchedule
from .registry import Beneficiary, Merchant, Organization, OrgUser, Region

_PREFIX_STORE = {
    "G": "orgs",
    "U": "org_users",
    "B": "beneficiaries",
    "M": "merchants",
    "Q": "quotas",
    "S": "schedules",
    "V": "vouchers",
}


@dataclass
class State:
    orgs: dict[str, Organization] = field(default_factory=dict)
    org_users: dict[str, OrgUser] = field(default_factory=dict)
    beneficiaries: dict[str, Beneficiary] = field(default_factory=dict)
    merchants: dict[str, Merchant] = field(default_factory=dict)
    quotas: dict[str, Quota] = field(default_factory=dict)
    schedules: dict[str, QuotaSchedule] = field(default_factory=dict)
    items: dict[str, list[QuotaItem]] = field(default_factory=dict)
    entitlements: dict[str, Entitlement] = field(default_factory=dict)
    vouchers: dict[str, Voucher] = field(default_factory=dict)

    def next_id(self, prefix: str) -> str:
        # Entities are never deleted, so size+1 is stable across replays.
        store: dict = getattr(self, _PREFIX_STORE[prefix])
        return f"{prefix}{len(store) + 1}"

    def to_dict(self) -> dict:
        return {
            "orgs": {k: _org(v) for k, v in self.orgs.items()},
            "org_users": {k: _org_user(v) for k, v in self.org_users.items()},
            "beneficiaries": {k: _beneficiary(v) for k, v in self.beneficiaries.items()},
            "merchants": {k: _merchant(v) for k, v in self.merchants.items()},
            "quotas": {k: _quota(v) for k, v in self.quotas.items()},
            "schedules": {k: _schedule(v) for k, v in self.schedules.items()},
            "items": {k: [_item(i) for i in v] for k, v in self.items.items()},
            "entitlements": {k: _entitlement(v) for k, v in self.entitlements.items()},
            "vouchers": {k: _voucher(v) for k, v in self.vouchers.items()},
        }

    def canonical(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "State":
        s = cls()
        s.orgs = {k: _org_back(v) for k, v in d["orgs"].items()}
        s.org_users = {k: _org_user_back(v) for k, v in d["org_users"].items()}
        s.beneficiaries = {k: _beneficiary_back(v) for k, v in d["beneficiaries"].items()}
        s.merchants = {k: _merchant_back(v) for k, v in d["merchants"].items()}
        s.quotas = {k: _quota_back(v) for k, v in d["quotas"].items()}
        s.schedules = {k: _schedule_back(v) for k, v in d["schedules"].items()}
        s.items = {k: [_item_back(k, i) for i in v] for k, v in d["items"].items()}
        s.entitlements = {k: _entitlement_back(v) for k, v in d["entitlements"].items()}
        s.vouchers = {k: _voucher_back(v) for k, v in d["vouchers"].items()}
        return s

    @classmethod
    def from_canonical(cls, text: str) -> "State":
        return cls.from_dict(json.loads(text))


def _org(o: Organization) -> dict:
    return {"id": o.id, "name": o.name, "kind": o.kind}


def _org_back(d: dict) -> Organization:
    return Organization(id=d["id"], name=d["name"], kind=d["kind"])


def _org_user(u: OrgUser) -> dict:
    return {"id": u.id, "org": u.org, "role": u.role}


def _org_user_back(d: dict) -> OrgUser:
    return OrgUser(id=d["id"], org=d["org"], role=d["role"])


def _beneficiary(b: Beneficiary) -> dict:
    return {
        "id": b.id,
        "national_id": b.national_id,
        "pin_salt": b.pin_salt,
        "pin_hash": b.pin_hash,
        "address": b.address,
        "region": {"zone": b.region.zone, "name": b.region.name},
        "mobile": b.mobile,
        "family_size": b.family_size,
        "preferred_merchant": b.preferred_merchant,
        "channel_profile": b.channel_profile,
        "cash_balance": b.cash_balance.piasters,
    }


def _beneficiary_back(d: dict) -> Beneficiary:
    return Beneficiary(
        id=d["id"],
        national_id=d["national_id"],
        pin_salt=d["pin_salt"],
        pin_hash=d["pin_hash"],
        address=d["address"],
        region=Region(d["region"]["zone"], d["region"]["name"]),
        mobile=d["mobile"],
        family_size=d["family_size"],
        preferred_merchant=d["preferred_merchant"],
        channel_profile=d["channel_profile"],
        cash_balance=Money(d["cash_balance"]),
    )


def _merchant(m: Merchant) -> dict:
    return {
        "id": m.id,
        "name": m.name,
        "region": {"zone": m.region.zone, "name": m.region.name},
        "categories": sorted(m.categories),
        "registered": m.registered,
    }


def _merchant_back(d: dict) -> Merchant:
    return Merchant(
        id=d["id"],
        name=d["name"],
        region=Region(d["region"]["zone"], d["region"]["name"]),
        categories=frozenset(d["categories"]),
        registered=d["registered"],
    )


def _quota(q: Quota) -> dict:
    return {
        "id": q.id,
        "org": q.org,
        "code": q.code,
        "name": q.name,
        "basis": q.basis,
        "notify_on_charge": q.notify_on_charge,
        "category": q.category,
    }


def _quota_back(d: dict) -> Quota:
    return Quota(
        id=d["id"],
        org=d["org"],
        code=d["code"],
        name=d["name"],
        basis=d["basis"],
        notify_on_charge=d["notify_on_charge"],
        category=d["category"],
    )


def _schedule(s: QuotaSchedule) -> dict:
    return {
        "id": s.id,
        "quota": s.quota,
        "periodicity": s.periodicity,
        "valid_from": s.valid_from.isoformat(),
        "valid_to": s.valid_to.isoformat(),
        "max_persons": s.max_persons,
    }


def _schedule_back(d: dict) -> QuotaSchedule:
    return QuotaSchedule(
        id=d["id"],
        quota=d["quota"],
        periodicity=d["periodicity"],
        valid_from=date.fromisoformat(d["valid_from"]),
        valid_to=date.fromisoformat(d["valid_to"]),
        max_persons=d["max_persons"],
    )


def _item(i: QuotaItem) -> dict:
    return {
        "item_id": i.item_id,
        "name": i.name,
        "unit": i.unit,
        "qty_per_person": i.qty_per_person.millis,
        "unit_merchant_price": i.unit_merchant_price.piasters,
        "unit_consumer_price": i.unit_consumer_price.piasters,
        "unit_org_cost": i.unit_org_cost.piasters,
    }


def _item_back(schedule: str, d: dict) -> QuotaItem:
    return QuotaItem(
        item_id=d["item_id"],
        schedule=schedule,
        name=d["name"],
        unit=d["unit"],
        qty_per_person=Quantity(d["qty_per_person"]),
        unit_merchant_price=Money(d["unit_merchant_price"]),
        unit_consumer_price=Money(d["unit_consumer_price"]),
        unit_org_cost=Money(d["unit_org_cost"]),
    )


def _entitlement(e: Entitlement) -> dict:
    return {
        "beneficiary": e.beneficiary,
        "schedule": e.schedule,
        "period_index": e.period_index,
        "charged_at": e.charged_at.isoformat(),
        "status": e.status,
    }


def _entitlement_back(d: dict) -> Entitlement:
    return Entitlement(
        beneficiary=d["beneficiary"],
        schedule=d["schedule"],
        period_index=d["period_index"],
        charged_at=datetime.fromisoformat(d["charged_at"]),
        status=d["status"],
    )


def _voucher(v: Voucher) -> dict:
    return {
        "id": v.id,
        "beneficiary": v.beneficiary,
        "quota": v.quota,
        "schedule": v.schedule,
        "period_index": v.period_index,
        "merchant": v.merchant,
        "state": v.state,
        "opened_at": v.opened_at.isoformat(),
        "closed_at": v.closed_at.isoformat() if v.closed_at else None,
        "details": [
            {
                "item_id": d.item_id,
                "formal_qty": d.formal_qty.millis,
                "actual_qty": d.actual_qty.millis,
                "unit_merchant_price": d.unit_merchant_price.piasters,
                "unit_consumer_price": d.unit_consumer_price.piasters,
                "unit_org_cost": d.unit_org_cost.piasters,
            }
            for d in v.details
        ],
        "total_merchant_price": v.total_merchant_price.piasters,
        "total_consumer_price": v.total_consumer_price.piasters,
    }


def _voucher_back(d: dict) -> Voucher:
    return Voucher(
        id=d["id"],
        beneficiary=d["beneficiary"],
        quota=d["quota"],
        schedule=d["schedule"],
        period_index=d["period_index"],
        merchant=d["merchant"],
        state=d["state"],
        opened_at=datetime.fromisoformat(d["opened_at"]),
        closed_at=datetime.fromisoformat(d["closed_at"]) if d["closed_at"] else None,
        details=[
            VoucherDetail(
                item_id=x["item_id"],
                formal_qty=Quantity(x["formal_qty"]),
                actual_qty=Quantity(x["actual_qty"]),
                unit_merchant_price=Money(x["unit_merchant_price"]),
                unit_consumer_price=Money(x["unit_consumer_price"]),
                unit_org_cost=Money(x["unit_org_cost"]),
            )
            for x in d["details"]
        ],
        total_merchant_price=Money(d["total_merchant_price"]),
        total_consumer_price=Money(d["total_consumer_price"]),
    )
