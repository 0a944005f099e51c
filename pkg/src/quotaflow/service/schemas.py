"""Request bodies for the organization-facing HTTP service.

Money and quantities travel as strings ("30.00", "0.500") — parsing is
lenient on input, rendering is canonical on output.
"""

from __future__ import annotations

from datetime import date, datetime

from pydantic import BaseModel, Field


class OrgIn(BaseModel):
    name: str
    kind: str  # Governmental | NGO


class OrgUserIn(BaseModel):
    org: str
    role: str


class BeneficiaryIn(BaseModel):
    national_id: str
    pin: str
    address: str = ""
    region: str  # "zone:name", e.g. "rural:Benha"
    mobile: str
    family_size: int = 1
    preferred_merchant: str | None = None
    channel_profile: str = "TextOnly"


class MerchantIn(BaseModel):
    name: str
    region: str
    categories: list[str] = Field(default_factory=lambda: ["food"])


class QuotaIn(BaseModel):
    name: str
    basis: str  # Personal | Family
    notify_on_charge: bool = False
    category: str = "food"


class ScheduleIn(BaseModel):
    periodicity: str
    valid_from: date
    valid_to: date
    max_persons: int | None = None


class ItemSpec(BaseModel):
    name: str
    unit: str
    qty_per_person: str
    unit_merchant_price: str
    unit_consumer_price: str
    unit_org_cost: str


class ItemsIn(BaseModel):
    items: list[ItemSpec]


class TextIn(BaseModel):
    mobile: str
    body: str


class ClockIn(BaseModel):
    to: datetime | None = None
    by: str | None = None  # ISO-8601 duration, e.g. "P1M" or "PT15M"
