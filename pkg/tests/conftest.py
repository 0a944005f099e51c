from datetime import date, datetime
from types import SimpleNamespace

import pytest

from quotaflow.platform import Platform
from quotaflow.sim.client import LocalClient
from quotaflow.sim.fixtures import DEMO_ITEMS, seed_demo

JAN = datetime(2024, 1, 3, 9, 0)


def make_world(
    platform: Platform,
    *,
    basis: str = "Family",
    family_size: int = 4,
    max_persons: int | None = 4,
    profile: str = "TextOnly",
    periodicity: str = "Monthly",
    valid_from: date = date(2024, 1, 1),
    valid_to: date = date(2024, 12, 31),
    items: list[dict] | None = None,
    advance_to: datetime | None = JAN,
) -> SimpleNamespace:
    """One org, one admin, one merchant, one beneficiary, one quota+schedule.

    Advancing past valid_from runs the first charging pass, so the
    beneficiary starts with an Open entitlement unless advance_to is None.
    """
    org = platform.create_org(None, "Ministry of Supply", "Governmental")
    admin = platform.create_org_user(None, org, "Administration")
    from quotaflow.registry import Region

    merchant = platform.register_merchant(admin, "Outlet A", Region("rural", "Benha"), {"food"})
    ben = platform.register_beneficiary(
        admin,
        national_id="29001011234567",
        pin="4821",
        address="1 Canal Street",
        region=Region("rural", "Benha"),
        mobile="+201000000100",
        family_size=family_size,
        preferred_merchant=merchant,
        channel_profile=profile,
    )
    q = platform.define_quota(admin, "Food", basis, True, "food")
    s = platform.define_schedule(admin, q, periodicity, valid_from, valid_to, max_persons)
    platform.set_items(admin, s, DEMO_ITEMS if items is None else items)
    if advance_to is not None:
        platform.advance_clock(advance_to)
    return SimpleNamespace(
        platform=platform,
        org=org,
        admin=admin,
        merchant=merchant,
        ben=ben,
        quota=q,
        schedule=s,
        mobile="+201000000100",
        pin="4821",
    )


@pytest.fixture
def platform():
    return Platform()


@pytest.fixture
def world(platform):
    return make_world(platform)


@pytest.fixture
def demo():
    platform = Platform()
    client = LocalClient(platform)
    manifest = seed_demo(client)
    return SimpleNamespace(platform=platform, client=client, manifest=manifest)


def texts(actions) -> list[str]:
    return [a.payload for a in actions if a.channel == "text"]


def frames(actions) -> list[dict]:
    return [a.payload for a in actions if a.channel == "app"]
