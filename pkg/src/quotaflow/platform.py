"""The command layer: one serialized queue in front of the whole ledger.

Every mutation follows decide -> append to journal -> apply, under one lock,
with time injected by the caller-facing clock rather than read from the wall.
Advancing the clock fires charging passes and session expiry at each crossed
calendar boundary, so identical command sequences yield identical journals.
"""

from __future__ import annotations

import threading
from datetime import datetime, timedelta
from pathlib import Path

from . import delivery, quota, registry, reports
from .errors import ClockRegression, Unauthorized, UnknownQuota, UnknownSchedule
from .events import Event, apply_event
from .journal import Journal, replay, write_snapshot
from .orchestrator import CLOSED, Orchestrator, OutboundAction
from .quota import ChargeReport
from .state import State

DEFAULT_EPOCH = datetime(2023, 12, 1)

# Ops whose credential may be omitted while the platform has no org users
# yet — someone has to create the first administrator.
BOOTSTRAP_OPS = frozenset({"create_org", "create_org_user"})


class Platform:
    def __init__(self, journal: Journal | None = None, snapshot_dir: str | Path | None = None):
        self.journal = journal if journal is not None else Journal()
        self.state: State = replay(self.journal)
        self.snapshot_dir = Path(snapshot_dir) if snapshot_dir else None
        events = self.journal.events()
        self.now = max(events[-1].at, DEFAULT_EPOCH) if events else DEFAULT_EPOCH
        self.lock = threading.RLock()
        self.orchestrator = Orchestrator(self)

    # --- core commit path -----------------------------------------------------

    def commit(self, decided: list[tuple[str, dict]]) -> list[Event]:
        """Durably append one command's events, then apply them."""
        with self.lock:
            events = self.journal.append_batch(self.now, decided)
            for event in events:
                apply_event(self.state, event)
            return events

    def _authorize(self, actor: str | None, op: str) -> registry.OrgUser | None:
        if actor is None and op in BOOTSTRAP_OPS and not self.state.org_users:
            return None
        return registry.authorize(self.state, actor, op)

    def _owned_quota(self, user: registry.OrgUser | None, quota_id: str) -> quota.Quota:
        q = self.state.quotas.get(quota_id)
        if q is None:
            raise UnknownQuota(quota_id)
        if user is not None and user.org != q.org:
            raise Unauthorized(f"{user.id} belongs to {user.org}, quota to {q.org}")
        return q

    # --- registry commands ------------------------------------------------------

    def create_org(self, actor: str | None, name: str, kind: str) -> str:
        with self.lock:
            self._authorize(actor, "create_org")
            payload = registry.create_org_payload(self.state, name, kind)
            self.commit([("OrgCreated", payload)])
            return payload["id"]

    def create_org_user(self, actor: str | None, org: str, role: str) -> str:
        with self.lock:
            self._authorize(actor, "create_org_user")
            payload = registry.create_org_user_payload(self.state, org, role)
            self.commit([("OrgUserCreated", payload)])
            return payload["id"]

    def register_beneficiary(
        self,
        actor: str | None,
        national_id: str,
        pin: str,
        address: str,
        region: registry.Region,
        mobile: str,
        family_size: int,
        preferred_merchant: str | None = None,
        channel_profile: str = registry.TEXT_ONLY,
    ) -> str:
        with self.lock:
            self._authorize(actor, "register_beneficiary")
            payload = registry.register_beneficiary_payload(
                self.state,
                national_id,
                pin,
                address,
                region,
                mobile,
                family_size,
                preferred_merchant,
                channel_profile,
            )
            self.commit([("BeneficiaryRegistered", payload)])
            return payload["id"]

    def register_merchant(
        self, actor: str | None, name: str, region: registry.Region, categories: set[str]
    ) -> str:
        with self.lock:
            self._authorize(actor, "register_merchant")
            payload = registry.register_merchant_payload(self.state, name, region, categories)
            self.commit([("MerchantRegistered", payload)])
            return payload["id"]

    # --- quota commands -----------------------------------------------------------

    def define_quota(
        self,
        actor: str | None,
        name: str,
        basis: str,
        notify_on_charge: bool,
        category: str = "food",
    ) -> str:
        with self.lock:
            user = self._authorize(actor, "define_quota")
            payload = quota.define_quota_payload(
                self.state, user.org, name, basis, notify_on_charge, category
            )
            self.commit([("QuotaDefined", payload)])
            return payload["id"]

    def define_schedule(
        self,
        actor: str | None,
        quota_id: str,
        periodicity: str,
        valid_from,
        valid_to,
        max_persons: int | None = None,
    ) -> str:
        with self.lock:
            user = self._authorize(actor, "define_schedule")
            self._owned_quota(user, quota_id)
            payload = quota.define_schedule_payload(
                self.state, quota_id, periodicity, valid_from, valid_to, max_persons
            )
            self.commit([("ScheduleDefined", payload)])
            return payload["id"]

    def set_items(self, actor: str | None, schedule_id: str, item_specs: list[dict]) -> None:
        with self.lock:
            user = self._authorize(actor, "set_items")
            sched = self.state.schedules.get(schedule_id)
            if sched is None:
                raise UnknownSchedule(schedule_id)
            self._owned_quota(user, sched.quota)
            payload = quota.set_items_payload(self.state, schedule_id, item_specs, self.now)
            self.commit([("ItemsSet", payload)])

    # --- clock and charging ---------------------------------------------------------

    def _charging_pass(self, at: datetime) -> tuple[ChargeReport, list[OutboundAction]]:
        decided, report = quota.charge_decisions(self.state, at)
        if decided:
            self.commit(decided)
        actions = [
            self.orchestrator.notify_charged(b, s, pi) for b, s, pi in report.notified
        ]
        return report, actions

    def advance_clock(self, to: datetime) -> list[OutboundAction]:
        with self.lock:
            if to < self.now:
                raise ClockRegression(f"clock runs forward only ({self.now} -> {to})")
            boundaries = set()
            for sched in self.state.schedules.values():
                boundaries.update(quota.cycle_boundaries(sched, self.now, to))
            for session in self.orchestrator.sessions.values():
                if session.phase != CLOSED and self.now < session.deadline <= to:
                    boundaries.add(session.deadline)
            actions: list[OutboundAction] = []
            for t in sorted(boundaries):
                self.now = t
                actions.extend(self.orchestrator.expire_sessions(t))
                _, charged = self._charging_pass(t)
                actions.extend(charged)
            self.now = to
            actions.extend(self.orchestrator.expire_sessions(to))
            return actions

    def advance_by(self, delta: timedelta) -> list[OutboundAction]:
        return self.advance_clock(self.now + delta)

    def run_charging_cycle(
        self, actor: str | None, now: datetime | None = None
    ) -> tuple[ChargeReport, list[OutboundAction]]:
        with self.lock:
            self._authorize(actor, "run_charging_cycle")
            actions: list[OutboundAction] = []
            if now is not None:
                if now < self.now:
                    raise ClockRegression(f"clock runs forward only ({self.now} -> {now})")
                actions.extend(self.advance_clock(now))
            report, charged = self._charging_pass(self.now)
            actions.extend(charged)
            return report, actions

    # --- channels ----------------------------------------------------------------------

    def handle_text(self, mobile: str, body: str) -> list[OutboundAction]:
        with self.lock:
            actions = self.orchestrator.expire_sessions(self.now)
            actions.extend(self.orchestrator.handle_text(mobile, body, self.now))
            return actions

    def handle_frame(self, message: dict) -> list[OutboundAction]:
        with self.lock:
            actions = self.orchestrator.expire_sessions(self.now)
            actions.extend(self.orchestrator.handle_frame(message, self.now))
            return actions

    # --- queries and maintenance ------------------------------------------------------

    def query_quota(self, beneficiary: str, quota_id: str, schedule: str):
        with self.lock:
            return quota.query_quota(self.state, beneficiary, quota_id, schedule, self.now)

    def monitor_vouchers(
        self,
        actor: str | None,
        state: str | None = None,
        schedule: str | None = None,
        region: str | None = None,
        merchant: str | None = None,
    ) -> list[dict]:
        with self.lock:
            self._authorize(actor, "monitor")
            rows = []
            for vid in sorted(self.state.vouchers, key=lambda v: int(v[1:])):
                v = self.state.vouchers[vid]
                if v.state == delivery.CANCELLED:
                    continue
                if state and v.state != state:
                    continue
                if schedule and v.schedule != schedule:
                    continue
                if merchant and v.merchant != merchant:
                    continue
                b_region = self.state.beneficiaries[v.beneficiary].region
                if region and region not in (b_region.render(), b_region.zone):
                    continue
                rows.append(self._voucher_row(v, b_region))
            return rows

    def _voucher_row(self, v: delivery.Voucher, b_region: registry.Region) -> dict:
        return {
            "id": v.id,
            "beneficiary": v.beneficiary,
            "region": b_region.render(),
            "quota": v.quota,
            "schedule": v.schedule,
            "period_index": v.period_index,
            "merchant": v.merchant,
            "state": v.state,
            "opened_at": v.opened_at.isoformat(),
            "closed_at": v.closed_at.isoformat() if v.closed_at else None,
            "total_merchant_price": v.total_merchant_price.render(),
            "total_consumer_price": v.total_consumer_price.render(),
            "details": [
                {
                    "item_id": d.item_id,
                    "formal_qty": d.formal_qty.render(),
                    "actual_qty": d.actual_qty.render(),
                    "unit_merchant_price": d.unit_merchant_price.render(),
                    "unit_consumer_price": d.unit_consumer_price.render(),
                    "unit_org_cost": d.unit_org_cost.render(),
                }
                for d in v.details
            ],
        }

    def report_region_distribution(self, actor: str | None, quota_id: str, period: int) -> dict:
        with self.lock:
            self._authorize(actor, "reports")
            return reports.region_distribution(self.journal, quota_id, period)

    def report_settlement(self, actor: str | None, merchant_id: str, period: int) -> dict:
        with self.lock:
            self._authorize(actor, "reports")
            return reports.settlement(self.journal, merchant_id, period)

    def report_subsidy_cost(self, actor: str | None, org_id: str, period: int) -> dict:
        with self.lock:
            self._authorize(actor, "reports")
            return reports.subsidy_cost(self.journal, org_id, period)

    def snapshot(self, actor: str | None, path: str | Path | None = None) -> Path:
        with self.lock:
            self._authorize(actor, "snapshot")
            if path is None:
                if self.snapshot_dir is None:
                    raise ValueError("no snapshot directory configured")
                self.snapshot_dir.mkdir(parents=True, exist_ok=True)
                path = self.snapshot_dir / f"snapshot-{self.journal.last_seq}.json"
            write_snapshot(self.state, self.journal.last_seq, path)
            return Path(path)
