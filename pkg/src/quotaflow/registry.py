"""Entity registry: beneficiaries, merchants, organizations and their users.

Holds identifier/credential validation and the role authorization matrix.
Registration commands produce event payloads; ``apply_*`` functions replay
them onto state.
"""

from __future__ import annotations

import hashlib
import hmac
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import (
    DuplicateMobile,
    DuplicateNationalId,
    MalformedNationalId,
    Unauthorized,
    UnknownMerchant,
    UnknownOrganization,
    ValidationError,
)
from .money import Money

if TYPE_CHECKING:
    from .state import State

NATIONAL_ID_RE = re.compile(r"^\d{14}$")
PIN_RE = re.compile(r"^\d{4}$")
MOBILE_RE = re.compile(r"^\+?\d{8,15}$")

TEXT_ONLY = "TextOnly"
APP_CAPABLE = "AppCapable"
CHANNEL_PROFILES = frozenset({TEXT_ONLY, APP_CAPABLE})

GOVERNMENTAL = "Governmental"
NGO = "NGO"
ORG_KINDS = frozenset({GOVERNMENTAL, NGO})

URBAN = "urban"
RURAL = "rural"
ZONES = frozenset({URBAN, RURAL})


class Role:
    ADMINISTRATION = "Administration"
    REPORTING = "Reporting"
    QUOTA_DELIVERY = "QuotaDelivery"
    BENEFICIARY_MGMT = "BeneficiaryMgmt"
    ALL = frozenset({ADMINISTRATION, REPORTING, QUOTA_DELIVERY, BENEFICIARY_MGMT})


# Operation -> roles permitted to perform it. Administration may do
# everything; Reporting is read-only over reports and the monitor.
AUTHZ: dict[str, frozenset[str]] = {
    "create_org": frozenset({Role.ADMINISTRATION}),
    "create_org_user": frozenset({Role.ADMINISTRATION}),
    "register_beneficiary": frozenset({Role.ADMINISTRATION, Role.BENEFICIARY_MGMT}),
    "register_merchant": frozenset({Role.ADMINISTRATION}),
    "define_quota": frozenset({Role.ADMINISTRATION}),
    "define_schedule": frozenset({Role.ADMINISTRATION, Role.QUOTA_DELIVERY}),
    "set_items": frozenset({Role.ADMINISTRATION, Role.QUOTA_DELIVERY}),
    "run_charging_cycle": frozenset({Role.ADMINISTRATION, Role.QUOTA_DELIVERY}),
    "monitor": frozenset({Role.ADMINISTRATION, Role.REPORTING}),
    "reports": frozenset({Role.ADMINISTRATION, Role.REPORTING}),
    "snapshot": frozenset({Role.ADMINISTRATION}),
}


@dataclass(frozen=True)
class Region:
    zone: str  # urban | rural
    name: str

    def render(self) -> str:
        return f"{self.zone}:{self.name}"

    @classmethod
    def parse(cls, text: str) -> "Region":
        zone, _, name = text.partition(":")
        return cls(zone, name)


@dataclass
class Beneficiary:
    id: str
    national_id: str
    pin_salt: str
    pin_hash: str
    address: str
    region: Region
    mobile: str
    family_size: int | None
    preferred_merchant: str | None
    channel_profile: str
    cash_balance: Money = field(default_factory=Money.zero)


@dataclass
class Merchant:
    id: str
    name: str
    region: Region
    categories: frozenset[str]
    registered: bool = True


@dataclass
class Organization:
    id: str
    name: str
    kind: str


@dataclass
class OrgUser:
    id: str
    org: str
    role: str


def hash_pin(salt: str, pin: str) -> str:
    return hashlib.sha256((salt + ":" + pin).encode()).hexdigest()


def derive_salt(national_id: str) -> str:
    # One fixed salt per record, derived so that replays rebuild identical
    # credential bytes without any stored randomness.
    return hashlib.sha256(b"pin-salt:" + national_id.encode()).hexdigest()[:16]


def authorize(state: "State", org_user_id: str | None, op: str) -> OrgUser:
    if org_user_id is None:
        raise Unauthorized("credentials required")
    user = state.org_users.get(org_user_id)
    if user is None:
        raise Unauthorized(f"unknown org user {org_user_id}")
    if user.role not in AUTHZ[op]:
        raise Unauthorized(f"role {user.role} may not {op}")
    return user


# --- command validation -> event payloads ---------------------------------


def register_beneficiary_payload(
    state: "State",
    national_id: str,
    pin: str,
    address: str,
    region: Region,
    mobile: str,
    family_size: int,
    preferred_merchant: str | None,
    channel_profile: str,
) -> dict:
    if not NATIONAL_ID_RE.match(national_id):
        raise MalformedNationalId(f"national id must be 14 digits, got {national_id!r}")
    if any(b.national_id == national_id for b in state.beneficiaries.values()):
        raise DuplicateNationalId(national_id)
    if not PIN_RE.match(pin):
        raise ValidationError("pin must be exactly 4 digits")
    if not MOBILE_RE.match(mobile):
        raise ValidationError(f"malformed mobile number {mobile!r}")
    if any(b.mobile == mobile for b in state.beneficiaries.values()):
        raise DuplicateMobile(mobile)
    if region.zone not in ZONES:
        raise ValidationError(f"region zone must be urban or rural, got {region.zone!r}")
    if family_size < 1:
        raise ValidationError("family_size must be >= 1")
    if channel_profile not in CHANNEL_PROFILES:
        raise ValidationError(f"unknown channel profile {channel_profile!r}")
    if preferred_merchant is not None and preferred_merchant not in state.merchants:
        raise UnknownMerchant(preferred_merchant)
    salt = derive_salt(national_id)
    return {
        "id": state.next_id("B"),
        "national_id": national_id,
        "pin_salt": salt,
        "pin_hash": hash_pin(salt, pin),
        "address": address,
        "region": {"zone": region.zone, "name": region.name},
        "mobile": mobile,
        "family_size": family_size,
        "preferred_merchant": preferred_merchant,
        "channel_profile": channel_profile,
    }


def register_merchant_payload(
    state: "State", name: str, region: Region, categories: set[str]
) -> dict:
    if not name.strip():
        raise ValidationError("merchant name must not be empty")
    if region.zone not in ZONES:
        raise ValidationError(f"region zone must be urban or rural, got {region.zone!r}")
    return {
        "id": state.next_id("M"),
        "name": name,
        "region": {"zone": region.zone, "name": region.name},
        "categories": sorted(categories),
    }


def create_org_payload(state: "State", name: str, kind: str) -> dict:
    if not name.strip():
        raise ValidationError("organization name must not be empty")
    if kind not in ORG_KINDS:
        raise ValidationError(f"organization kind must be Governmental or NGO, got {kind!r}")
    return {"id": state.next_id("G"), "name": name, "kind": kind}


def create_org_user_payload(state: "State", org: str, role: str) -> dict:
    if org not in state.orgs:
        raise UnknownOrganization(org)
    if role not in Role.ALL:
        raise ValidationError(f"unknown role {role!r}")
    return {"id": state.next_id("U"), "org": org, "role": role}


# --- event application -----------------------------------------------------


def apply_beneficiary_registered(state: "State", p: dict) -> None:
    state.beneficiaries[p["id"]] = Beneficiary(
        id=p["id"],
        national_id=p["national_id"],
        pin_salt=p["pin_salt"],
        pin_hash=p["pin_hash"],
        address=p["address"],
        region=Region(p["region"]["zone"], p["region"]["name"]),
        mobile=p["mobile"],
        family_size=p["family_size"],
        preferred_merchant=p["preferred_merchant"],
        channel_profile=p["channel_profile"],
    )


def apply_merchant_registered(state: "State", p: dict) -> None:
    state.merchants[p["id"]] = Merchant(
        id=p["id"],
        name=p["name"],
        region=Region(p["region"]["zone"], p["region"]["name"]),
        categories=frozenset(p["categories"]),
    )


def apply_org_created(state: "State", p: dict) -> None:
    state.orgs[p["id"]] = Organization(id=p["id"], name=p["name"], kind=p["kind"])


def apply_org_user_created(state: "State", p: dict) -> None:
    state.org_users[p["id"]] = OrgUser(id=p["id"], org=p["org"], role=p["role"])


def apply_balance_credited(state: "State", p: dict) -> None:
    b = state.beneficiaries[p["beneficiary"]]
    b.cash_balance = b.cash_balance + Money(p["amount"])


# --- queries ----------------------------------------------------------------

_DUMMY_SALT = "0" * 16
_DUMMY_HASH = hash_pin(_DUMMY_SALT, "0000")


def is_valid_consumer(state: "State", beneficiary_id: str, pin: str) -> bool:
    """True iff the beneficiary exists and the pin matches.

    Unknown ids take the same comparison path as wrong pins so callers
    cannot distinguish the two failures.
    """
    b = state.beneficiaries.get(beneficiary_id)
    if b is None:
        hmac.compare_digest(hash_pin(_DUMMY_SALT, pin), _DUMMY_HASH)
        return False
    return hmac.compare_digest(hash_pin(b.pin_salt, pin), b.pin_hash)
