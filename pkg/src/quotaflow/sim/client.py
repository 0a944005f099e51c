"""Two interchangeable drivers: in-process platform or HTTP thin client.

Scripts, fixtures, and the fuzzer talk to this interface only, so the same
scenario runs standalone against a journal directory or against a live
service.
"""

from __future__ import annotations

import json
from datetime import date, datetime

from ..errors import QuotaflowError
from ..platform import Platform
from ..registry import Region
from ..service.app import render_action


class LocalClient:
    """Drives a Platform directly; actions come back already rendered."""

    def __init__(self, platform: Platform):
        self.platform = platform

    def create_org(self, actor: str | None, name: str, kind: str) -> str:
        return self.platform.create_org(actor, name, kind)

    def create_org_user(self, actor: str | None, org: str, role: str) -> str:
        return self.platform.create_org_user(actor, org, role)

    def register_beneficiary(self, actor: str | None, **fields) -> str:
        fields["region"] = Region.parse(fields["region"])
        return self.platform.register_beneficiary(actor, **fields)

    def register_merchant(
        self, actor: str | None, name: str, region: str, categories: list[str]
    ) -> str:
        return self.platform.register_merchant(actor, name, Region.parse(region), set(categories))

    def define_quota(
        self, actor: str | None, name: str, basis: str, notify_on_charge: bool, category: str
    ) -> str:
        return self.platform.define_quota(actor, name, basis, notify_on_charge, category)

    def define_schedule(
        self,
        actor: str | None,
        quota: str,
        periodicity: str,
        valid_from: date,
        valid_to: date,
        max_persons: int | None,
    ) -> str:
        return self.platform.define_schedule(
            actor, quota, periodicity, valid_from, valid_to, max_persons
        )

    def set_items(self, actor: str | None, schedule: str, items: list[dict]) -> None:
        self.platform.set_items(actor, schedule, items)

    def run_charging_cycle(self, actor: str | None, now: datetime | None = None) -> list[dict]:
        _, actions = self.platform.run_charging_cycle(actor, now)
        return [render_action(a) for a in actions]

    def clock_now(self) -> datetime:
        return self.platform.now

    def advance_clock(self, to: datetime) -> list[dict]:
        return [render_action(a) for a in self.platform.advance_clock(to)]

    def send_text(self, mobile: str, body: str) -> list[dict]:
        return [render_action(a) for a in self.platform.handle_text(mobile, body)]

    def send_frame(self, message: dict) -> list[dict]:
        return [render_action(a) for a in self.platform.handle_frame(message)]

    def state_doc(self) -> dict:
        with self.platform.lock:
            return self.platform.state.to_dict()

    def journal_lines(self) -> list[str]:
        return self.platform.journal.lines()


class HttpClient:
    """Same surface over the HTTP service; needs an admin actor for reads."""

    def __init__(self, base_url: str, admin_actor: str | None = None):
        import httpx

        self.http = httpx.Client(base_url=base_url, timeout=30.0)
        self.admin_actor = admin_actor

    def _check(self, response) -> dict:
        if response.status_code >= 400:
            doc = response.json()
            raise QuotaflowError(f"{doc.get('reason')}: {doc.get('detail')}")
        return response.json()

    def _post(self, path: str, actor: str | None = None, json_body: dict | None = None, **kw):
        headers = {"X-Org-User": actor} if actor else {}
        return self._check(self.http.post(path, json=json_body, headers=headers, **kw))

    def _get(self, path: str, actor: str | None = None, **params):
        headers = {"X-Org-User": actor} if actor else {}
        clean = {k: v for k, v in params.items() if v is not None}
        return self._check(self.http.get(path, params=clean, headers=headers))

    def create_org(self, actor, name, kind):
        return self._post("/orgs", actor, {"name": name, "kind": kind})["id"]

    def create_org_user(self, actor, org, role):
        return self._post("/org-users", actor, {"org": org, "role": role})["id"]

    def register_beneficiary(self, actor, **fields):
        return self._post("/beneficiaries", actor, fields)["id"]

    def register_merchant(self, actor, name, region, categories):
        return self._post(
            "/merchants", actor, {"name": name, "region": region, "categories": categories}
        )["id"]

    def define_quota(self, actor, name, basis, notify_on_charge, category):
        body = {
            "name": name,
            "basis": basis,
            "notify_on_charge": notify_on_charge,
            "category": category,
        }
        return self._post("/quotas", actor, body)["id"]

    def define_schedule(self, actor, quota, periodicity, valid_from, valid_to, max_persons):
        body = {
            "periodicity": periodicity,
            "valid_from": valid_from.isoformat(),
            "valid_to": valid_to.isoformat(),
            "max_persons": max_persons,
        }
        return self._post(f"/quotas/{quota}/schedules", actor, body)["id"]

    def set_items(self, actor, schedule, items):
        self._post(f"/schedules/{schedule}/items", actor, {"items": items})

    def run_charging_cycle(self, actor, now=None):
        params = {"now": now.isoformat()} if now else {}
        return self._post("/charging-cycles", actor, None, params=params)["actions"]

    def clock_now(self) -> datetime:
        return datetime.fromisoformat(self._get("/clock")["now"])

    def advance_clock(self, to: datetime) -> list[dict]:
        return self._post("/clock/advance", None, {"to": to.isoformat()})["actions"]

    def send_text(self, mobile: str, body: str) -> list[dict]:
        return self._post("/channels/text", None, {"mobile": mobile, "body": body})["actions"]

    def send_frame(self, message: dict) -> list[dict]:
        from .. import channels

        headers = {"Content-Type": "application/octet-stream"}
        response = self.http.post(
            "/channels/app", content=channels.encode_frame(message), headers=headers
        )
        return self._check(response)["actions"]

    def state_doc(self) -> dict:
        headers = {"X-Org-User": self.admin_actor} if self.admin_actor else {}
        response = self.http.get("/state", headers=headers)
        if response.status_code >= 400:
            raise QuotaflowError(f"state read failed: {response.text}")
        return json.loads(response.text)

    def journal_lines(self) -> list[str]:
        return self._get("/journal", actor=self.admin_actor)["lines"]
