"""Event model: the single vocabulary of ledger mutations.

Every state change is one of the kinds below; ``apply_event`` is the only
code path that mutates State, both live and during replay.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from . import delivery, quota, registry
from .state import State

KINDS = frozenset(
    {
        "BeneficiaryRegistered",
        "MerchantRegistered",
        "OrgCreated",
        "OrgUserCreated",
        "QuotaDefined",
        "ScheduleDefined",
        "ItemsSet",
        "EntitlementCharged",
        "VoucherOpened",
        "QtyUpdated",
        "DeliveryConfirmed",
        "VoucherCancelled",
        "BalanceCredited",
        "EntitlementExpired",
    }
)


@dataclass(frozen=True)
class Event:
    seq: int
    at: datetime
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "at": self.at.isoformat(), "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, d: dict) -> "Event":
        return cls(
            seq=d["seq"],
            at=datetime.fromisoformat(d["at"]),
            kind=d["kind"],
            payload=d["payload"],
        )


def apply_event(state: State, event: Event) -> None:
    kind, p, at = event.kind, event.payload, event.at
    if kind == "BeneficiaryRegistered":
        registry.apply_beneficiary_registered(state, p)
    elif kind == "MerchantRegistered":
        registry.apply_merchant_registered(state, p)
    elif kind == "OrgCreated":
        registry.apply_org_created(state, p)
    elif kind == "OrgUserCreated":
        registry.apply_org_user_created(state, p)
    elif kind == "QuotaDefined":
        quota.apply_quota_defined(state, p)
    elif kind == "ScheduleDefined":
        quota.apply_schedule_defined(state, p)
    elif kind == "ItemsSet":
        quota.apply_items_set(state, p)
    elif kind == "EntitlementCharged":
        quota.apply_entitlement_charged(state, p, at)
    elif kind == "VoucherOpened":
        delivery.apply_voucher_opened(state, p, at)
    elif kind == "QtyUpdated":
        delivery.apply_qty_updated(state, p)
    elif kind == "DeliveryConfirmed":
        delivery.apply_delivery_confirmed(state, p, at)
    elif kind == "VoucherCancelled":
        delivery.apply_voucher_cancelled(state, p, at)
    elif kind == "BalanceCredited":
        registry.apply_balance_credited(state, p)
    elif kind == "EntitlementExpired":
        quota.apply_entitlement_expired(state, p)
    else:
        raise ValueError(f"unknown event kind {kind!r}")
