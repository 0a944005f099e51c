"""Charging cycle: idempotence, expiry, notification routing."""

from datetime import date, datetime

from quotaflow.platform import Platform
from quotaflow.quota import charge_decisions, entitlement_key

from conftest import make_world


def keys_by_status(state, status):
    return sorted(k for k, e in state.entitlements.items() if e.status == status)


def test_first_pass_charges_every_beneficiary(demo):
    platform = demo.platform
    platform.advance_clock(datetime(2024, 1, 1))
    bens = demo.manifest["beneficiaries"]
    for b in bens:
        assert entitlement_key(b, "S1", 0) in platform.state.entitlements
    # the blanket schedule is not in window yet
    assert not any(e.schedule == "S2" for e in platform.state.entitlements.values())


def test_charging_is_idempotent(demo):
    platform = demo.platform
    platform.advance_clock(datetime(2024, 1, 1))
    before = len(platform.state.entitlements)
    events, report = charge_decisions(platform.state, platform.now)
    assert events == []
    assert report.created == [] and report.expired == []
    platform.run_charging_cycle(demo.manifest["org_users"]["admin"])
    assert len(platform.state.entitlements) == before


def test_explicit_cycle_backfills_after_late_definition(platform):
    # items arrive when the clock already sits inside the window: boundary
    # crossings skipped the empty schedule, so an explicit run must backfill
    world = make_world(platform, items=[], advance_to=None)
    platform.advance_clock(datetime(2024, 3, 10))
    assert platform.state.entitlements == {}
    from quotaflow.sim.fixtures import DEMO_ITEMS

    platform.set_items(world.admin, world.schedule, DEMO_ITEMS)
    platform.run_charging_cycle(world.admin)
    assert keys_by_status(platform.state, "Open") == [entitlement_key(world.ben, "S1", 2)]


def test_unclaimed_entitlements_expire_at_next_boundary(world):
    platform = world.platform
    key = entitlement_key(world.ben, world.schedule, 0)
    assert platform.state.entitlements[key].status == "Open"
    platform.advance_clock(datetime(2024, 2, 2))
    assert platform.state.entitlements[key].status == "Expired"
    assert platform.state.entitlements[entitlement_key(world.ben, world.schedule, 1)].status == "Open"


def test_expiry_after_window_end(platform):
    world = make_world(
        platform,
        periodicity="Once",
        valid_from=date(2024, 1, 1),
        valid_to=date(2024, 1, 31),
        advance_to=datetime(2024, 1, 5),
    )
    key = entitlement_key(world.ben, world.schedule, 0)
    platform.advance_clock(datetime(2024, 2, 10))
    assert platform.state.entitlements[key].status == "Expired"
    # nothing new is charged outside the window
    assert len(platform.state.entitlements) == 1


def test_delivered_entitlements_survive_expiry_pass(world):
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    platform.handle_frame({"kind": "submit", "session": "T1", "body": {"merchant": world.merchant}})
    platform.handle_text(world.mobile, "OK 4821")
    key = entitlement_key(world.ben, world.schedule, 0)
    assert platform.state.entitlements[key].status == "Claimed"
    platform.advance_clock(datetime(2024, 2, 2))
    assert platform.state.entitlements[key].status == "Claimed"


def test_abandoned_voucher_expires_with_its_period(world):
    # an in-flight session at a month boundary times out first, the freed
    # entitlement then expires in the same pass
    platform = world.platform
    platform.handle_text(world.mobile, "REQ FOOD")
    key = entitlement_key(world.ben, world.schedule, 0)
    platform.advance_clock(datetime(2024, 2, 2))
    assert platform.state.vouchers["V1"].state == "Cancelled"
    assert platform.state.entitlements[key].status == "Expired"


def test_schedule_without_items_is_skipped(platform):
    world = make_world(platform, items=[], advance_to=None)
    platform.advance_clock(datetime(2024, 1, 15))
    events, report = charge_decisions(platform.state, platform.now)
    assert events == []
    assert platform.state.entitlements == {}
    assert any("no items" in s for s in report.skipped)


def test_notifications_follow_quota_flag_and_profile(demo):
    platform = demo.platform
    actions = platform.advance_clock(datetime(2024, 1, 1))
    texts = [a for a in actions if a.channel == "text"]
    frames = [a for a in actions if a.channel == "app"]
    # Food notifies on charge; every beneficiary hears exactly once, on
    # their own channel
    assert {a.target for a in texts} | {a.target for a in frames} == set(
        demo.manifest["beneficiaries"]
    )
    assert all(a.payload == "CHARGED FOOD P0" for a in texts)
    assert all(f.payload["kind"] == "charged" for f in frames)
    # the blanket quota has notify_on_charge=False
    actions = platform.advance_clock(datetime(2024, 11, 1))
    assert not any(
        "WINTERBLANKET" in str(a.payload) or a.channel == "app" and a.payload["body"].get("quota") == "WINTERBLANKET"
        for a in actions
    )
    assert any(e.schedule == "S2" for e in platform.state.entitlements.values())


def test_year_of_monthly_periods(world):
    platform = world.platform
    platform.advance_clock(datetime(2025, 1, 15))
    ents = [e for e in platform.state.entitlements.values() if e.schedule == world.schedule]
    assert len(ents) == 12
    assert sorted(e.period_index for e in ents) == list(range(12))
    assert all(e.status == "Expired" for e in ents)
