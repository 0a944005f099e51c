"""Seed fixtures: demo, minimal, and seed-randomized populations.

All three are deterministic — ids come out identical on every run, and the
randomized profile derives everything from its seed.
"""

from __future__ import annotations

import random
from datetime import date

DEMO_ITEMS = [
    {
        "name": "Oil",
        "unit": "kg",
        "qty_per_person": "0.500",
        "unit_merchant_price": "30.00",
        "unit_consumer_price": "27.00",
        "unit_org_cost": "28.00",
    },
    {
        "name": "Sugar",
        "unit": "kg",
        "qty_per_person": "1.000",
        "unit_merchant_price": "12.00",
        "unit_consumer_price": "10.00",
        "unit_org_cost": "10.50",
    },
]

_DEMO_BENEFICIARIES = [
    # (national_id, pin, family, profile, region, preferred merchant index)
    ("29001011234567", "4821", 4, "TextOnly", "rural:Benha", 0),
    ("29102021234568", "7342", 3, "AppCapable", "urban:Cairo", 1),
    ("29203031234569", "1903", 1, "TextOnly", "urban:Cairo", 1),
    ("29304041234570", "5566", 6, "AppCapable", "rural:Benha", 0),
    ("29405051234571", "2718", 2, "TextOnly", "rural:Benha", 0),
    ("29506061234572", "3141", 5, "AppCapable", "urban:Cairo", 1),
    ("29607071234573", "9090", 4, "TextOnly", "urban:Cairo", 1),
    ("29708081234574", "4545", 1, "AppCapable", "rural:Benha", 0),
    ("29809091234575", "8282", 3, "TextOnly", "rural:Benha", 0),
    ("29910101234576", "6060", 2, "AppCapable", "urban:Cairo", 1),
    ("30011111234577", "7777", 5, "TextOnly", "urban:Cairo", 1),
    ("30112121234578", "1219", 4, "AppCapable", "rural:Benha", 0),
]


def seed_demo(client) -> dict:
    g1 = client.create_org(None, "Ministry of Supply", "Governmental")
    u1 = client.create_org_user(None, g1, "Administration")
    g2 = client.create_org(u1, "Hope Relief Network", "NGO")
    users = {
        "admin": u1,
        "reporting": client.create_org_user(u1, g1, "Reporting"),
        "quota_delivery": client.create_org_user(u1, g1, "QuotaDelivery"),
        "ngo_admin": client.create_org_user(u1, g2, "Administration"),
        "beneficiary_mgmt": client.create_org_user(u1, g1, "BeneficiaryMgmt"),
    }
    merchants = [
        client.register_merchant(u1, "Outlet A", "rural:Benha", ["food"]),
        client.register_merchant(u1, "Outlet B", "urban:Cairo", ["food", "clothing"]),
        client.register_merchant(u1, "Clinic B", "urban:Cairo", ["medical"]),
    ]
    beneficiaries = []
    for i, (nid, pin, family, profile, region, pref) in enumerate(_DEMO_BENEFICIARIES):
        beneficiaries.append(
            client.register_beneficiary(
                u1,
                national_id=nid,
                pin=pin,
                address=f"{i + 1} Canal Street",
                region=region,
                mobile=f"+2010000001{i:02d}",
                family_size=family,
                preferred_merchant=merchants[pref],
                channel_profile=profile,
            )
        )
    q1 = client.define_quota(u1, "Food", "Family", True, "food")
    s1 = client.define_schedule(u1, q1, "Monthly", date(2024, 1, 1), date(2024, 12, 31), 4)
    client.set_items(u1, s1, DEMO_ITEMS)
    q2 = client.define_quota(users["ngo_admin"], "Winter Blanket", "Personal", False, "clothing")
    s2 = client.define_schedule(
        users["ngo_admin"], q2, "Once", date(2024, 11, 1), date(2024, 11, 30), None
    )
    client.set_items(
        users["ngo_admin"],
        s2,
        [
            {
                "name": "Blanket",
                "unit": "piece",
                "qty_per_person": "1.000",
                "unit_merchant_price": "80.00",
                "unit_consumer_price": "20.00",
                "unit_org_cost": "65.00",
            }
        ],
    )
    return {
        "profile": "demo",
        "orgs": [g1, g2],
        "org_users": users,
        "merchants": merchants,
        "beneficiaries": beneficiaries,
        "quotas": {q1: "FOOD", q2: "WINTERBLANKET"},
        "schedules": [s1, s2],
        "pins": {b: row[1] for b, row in zip(beneficiaries, _DEMO_BENEFICIARIES)},
    }


def seed_minimal(client) -> dict:
    g1 = client.create_org(None, "Ministry of Supply", "Governmental")
    u1 = client.create_org_user(None, g1, "Administration")
    m1 = client.register_merchant(u1, "Outlet A", "rural:Benha", ["food"])
    b1 = client.register_beneficiary(
        u1,
        national_id="29001011234567",
        pin="4821",
        address="1 Canal Street",
        region="rural:Benha",
        mobile="+201000000100",
        family_size=4,
        preferred_merchant=m1,
        channel_profile="TextOnly",
    )
    q1 = client.define_quota(u1, "Food", "Family", True, "food")
    s1 = client.define_schedule(u1, q1, "Monthly", date(2024, 1, 1), date(2024, 12, 31), 4)
    client.set_items(u1, s1, DEMO_ITEMS)
    return {
        "profile": "minimal",
        "orgs": [g1],
        "org_users": {"admin": u1},
        "merchants": [m1],
        "beneficiaries": [b1],
        "quotas": {q1: "FOOD"},
        "schedules": [s1],
        "pins": {b1: "4821"},
    }


_CATALOG = [
    ("Oil", "kg"),
    ("Sugar", "kg"),
    ("Rice", "kg"),
    ("Tea", "kg"),
    ("Flour", "kg"),
    ("Lentils", "kg"),
]

_REGIONS = ["rural:Benha", "urban:Cairo", "rural:Fayoum", "urban:Giza"]


def seed_randomized(client, seed: int) -> dict:
    rng = random.Random(seed)
    g1 = client.create_org(None, "Ministry of Supply", "Governmental")
    u1 = client.create_org_user(None, g1, "Administration")
    merchants = [
        client.register_merchant(
            u1, f"Outlet {chr(65 + i)}", rng.choice(_REGIONS), ["food"]
        )
        for i in range(rng.randint(2, 4))
    ]
    beneficiaries = []
    pins = {}
    for i in range(rng.randint(5, 15)):
        pin = f"{rng.randint(0, 9999):04d}"
        bid = client.register_beneficiary(
            u1,
            national_id=f"29{rng.randint(0, 10**12 - 1):012d}",
            pin=pin,
            address=f"{i + 1} Random Road",
            region=rng.choice(_REGIONS),
            mobile=f"+2012{rng.randint(0, 10**8 - 1):08d}",
            family_size=rng.randint(1, 7),
            preferred_merchant=rng.choice(merchants),
            channel_profile=rng.choice(["TextOnly", "AppCapable"]),
        )
        beneficiaries.append(bid)
        pins[bid] = pin
    q1 = client.define_quota(u1, "Food", rng.choice(["Family", "Personal"]), True, "food")
    s1 = client.define_schedule(
        u1,
        q1,
        rng.choice(["Monthly", "Weekly", "Daily"]),
        date(2024, 1, 1),
        date(2024, 12, 31),
        rng.choice([None, 3, 4, 5]),
    )
    items = []
    for name, unit in rng.sample(_CATALOG, rng.randint(1, 4)):
        cons = rng.randint(100, 3000)
        merch = cons + rng.randint(0, 800)
        cost = (cons + merch) // 2
        qty = rng.randint(1, 16) * 125  # millis, 0.125 .. 2.000
        items.append(
            {
                "name": name,
                "unit": unit,
                "qty_per_person": f"{qty // 1000}.{qty % 1000:03d}",
                "unit_merchant_price": f"{merch // 100}.{merch % 100:02d}",
                "unit_consumer_price": f"{cons // 100}.{cons % 100:02d}",
                "unit_org_cost": f"{cost // 100}.{cost % 100:02d}",
            }
        )
    client.set_items(u1, s1, items)
    return {
        "profile": f"randomized({seed})",
        "orgs": [g1],
        "org_users": {"admin": u1},
        "merchants": merchants,
        "beneficiaries": beneficiaries,
        "quotas": {q1: "FOOD"},
        "schedules": [s1],
        "pins": pins,
    }


def seed(client, profile: str, seed_value: int = 0) -> dict:
    if profile == "demo":
        return seed_demo(client)
    if profile == "minimal":
        return seed_minimal(client)
    if profile == "randomized":
        return seed_randomized(client, seed_value)
    raise ValueError(f"unknown profile {profile!r}")
