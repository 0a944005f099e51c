"""HTTP boundary for organizations, channels, and the simulated clock.

All mutating endpoints authenticate via the X-Org-User header (role matrix
enforced in the platform); the only exception is bootstrapping the very
first organization and administrator on an empty ledger.
"""

from __future__ import annotations

from datetime import datetime

from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .. import channels
from ..duration import add_duration
from ..errors import (
    QuotaflowError,
    Unauthorized,
    UnknownEntity,
    ValidationError,
)
from ..orchestrator import OutboundAction
from ..platform import Platform
from ..registry import Region
from . import schemas


def _status_for(exc: QuotaflowError) -> int:
    if isinstance(exc, Unauthorized):
        return 401
    if isinstance(exc, UnknownEntity):
        return 404
    return 422


def render_action(action: OutboundAction) -> dict:
    rendered: dict = {"target": action.target, "channel": action.channel}
    if action.channel == "text":
        rendered["mobile"] = action.mobile
        rendered["body"] = action.payload
    else:
        rendered["frame"] = action.payload
    return rendered


def _actions(actions: list[OutboundAction]) -> dict:
    return {"actions": [render_action(a) for a in actions]}


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="quotaflow", docs_url=None, redoc_url=None)
    app.state.platform = platform
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(QuotaflowError)
    async def quotaflow_error(_request: Request, exc: QuotaflowError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"reason": exc.code, "detail": exc.detail},
        )

    @app.exception_handler(RequestValidationError)
    async def body_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"reason": "ValidationFailure", "detail": str(exc.errors()[:3])},
        )

    def authenticated(actor: str | None) -> str:
        if actor is None or actor not in platform.state.org_users:
            raise Unauthorized("valid X-Org-User header required")
        return actor

    # --- registry ------------------------------------------------------------

    @app.post("/orgs")
    def create_org(body: schemas.OrgIn, x_org_user: str | None = Header(default=None)):
        return {"id": platform.create_org(x_org_user, body.name, body.kind)}

    @app.post("/org-users")
    def create_org_user(body: schemas.OrgUserIn, x_org_user: str | None = Header(default=None)):
        return {"id": platform.create_org_user(x_org_user, body.org, body.role)}

    @app.post("/beneficiaries")
    def register_beneficiary(
        body: schemas.BeneficiaryIn, x_org_user: str | None = Header(default=None)
    ):
        return {
            "id": platform.register_beneficiary(
                x_org_user,
                body.national_id,
                body.pin,
                body.address,
                Region.parse(body.region),
                body.mobile,
                body.family_size,
                body.preferred_merchant,
                body.channel_profile,
            )
        }

    @app.post("/merchants")
    def register_merchant(body: schemas.MerchantIn, x_org_user: str | None = Header(default=None)):
        return {
            "id": platform.register_merchant(
                x_org_user, body.name, Region.parse(body.region), set(body.categories)
            )
        }

    # --- quota definition -------------------------------------------------------

    @app.post("/quotas")
    def define_quota(body: schemas.QuotaIn, x_org_user: str | None = Header(default=None)):
        return {
            "id": platform.define_quota(
                x_org_user, body.name, body.basis, body.notify_on_charge, body.category
            )
        }

    @app.post("/quotas/{quota_id}/schedules")
    def define_schedule(
        quota_id: str, body: schemas.ScheduleIn, x_org_user: str | None = Header(default=None)
    ):
        return {
            "id": platform.define_schedule(
                x_org_user,
                quota_id,
                body.periodicity,
                body.valid_from,
                body.valid_to,
                body.max_persons,
            )
        }

    @app.post("/schedules/{schedule_id}/items")
    def set_items(
        schedule_id: str, body: schemas.ItemsIn, x_org_user: str | None = Header(default=None)
    ):
        platform.set_items(x_org_user, schedule_id, [i.model_dump() for i in body.items])
        return {"schedule": schedule_id, "items": len(body.items)}

    @app.post("/charging-cycles")
    def run_charging_cycle(
        now: datetime | None = Query(default=None),
        x_org_user: str | None = Header(default=None),
    ):
        report, actions = platform.run_charging_cycle(x_org_user, now)
        return {
            "at": report.at.isoformat(),
            "created": report.created,
            "expired": report.expired,
            "notified": report.notified,
            "skipped": report.skipped,
            **_actions(actions),
        }

    # --- monitor and reports ------------------------------------------------------

    @app.get("/vouchers")
    def vouchers(
        state: str | None = None,
        schedule: str | None = None,
        region: str | None = None,
        merchant: str | None = None,
        x_org_user: str | None = Header(default=None),
    ):
        rows = platform.monitor_vouchers(x_org_user, state, schedule, region, merchant)
        return {"vouchers": rows}

    @app.get("/reports/region-distribution")
    def region_distribution(
        quota: str, period: int = 0, x_org_user: str | None = Header(default=None)
    ):
        return platform.report_region_distribution(x_org_user, quota, period)

    @app.get("/reports/settlement")
    def settlement(merchant: str, period: int = 0, x_org_user: str | None = Header(default=None)):
        return platform.report_settlement(x_org_user, merchant, period)

    @app.get("/reports/subsidy-cost")
    def subsidy_cost(org: str, period: int = 0, x_org_user: str | None = Header(default=None)):
        return platform.report_subsidy_cost(x_org_user, org, period)

    # --- channels -------------------------------------------------------------------

    @app.post("/channels/text")
    def channel_text(body: schemas.TextIn):
        return _actions(platform.handle_text(body.mobile, body.body))

    @app.post("/channels/app")
    async def channel_app(request: Request):
        message = channels.decode_frame(await request.body())
        return _actions(platform.handle_frame(message))

    # --- clock --------------------------------------------------------------------

    @app.get("/clock")
    def clock():
        return {"now": platform.now.isoformat()}

    @app.post("/clock/advance")
    def clock_advance(body: schemas.ClockIn):
        if (body.to is None) == (body.by is None):
            raise ValidationError("provide exactly one of 'to' or 'by'")
        to = body.to if body.to is not None else add_duration(platform.now, body.by)
        actions = platform.advance_clock(to)
        return {"now": platform.now.isoformat(), **_actions(actions)}

    # --- read side (any authenticated org user) ---------------------------------------

    @app.get("/orgs")
    def list_orgs(x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            return {
                "orgs": [
                    {"id": o.id, "name": o.name, "kind": o.kind}
                    for o in platform.state.orgs.values()
                ]
            }

    @app.get("/org-users/{user_id}")
    def get_org_user(user_id: str, x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            u = platform.state.org_users.get(user_id)
            if u is None:
                raise UnknownEntity(user_id)
            return {"id": u.id, "org": u.org, "role": u.role}

    @app.get("/merchants")
    def list_merchants(x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            return {
                "merchants": [
                    {
                        "id": m.id,
                        "name": m.name,
                        "region": m.region.render(),
                        "categories": sorted(m.categories),
                    }
                    for m in platform.state.merchants.values()
                ]
            }

    @app.get("/beneficiaries")
    def list_beneficiaries(x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            return {
                "beneficiaries": [
                    _beneficiary_row(b) for b in platform.state.beneficiaries.values()
                ]
            }

    @app.get("/beneficiaries/{beneficiary_id}")
    def get_beneficiary(beneficiary_id: str, x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            b = platform.state.beneficiaries.get(beneficiary_id)
            if b is None:
                raise UnknownEntity(beneficiary_id)
            return _beneficiary_row(b)

    @app.get("/quotas")
    def list_quotas(x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            state = platform.state
            return {
                "quotas": [
                    {
                        "id": q.id,
                        "org": q.org,
                        "code": q.code,
                        "name": q.name,
                        "basis": q.basis,
                        "notify_on_charge": q.notify_on_charge,
                        "category": q.category,
                        "schedules": [
                            _schedule_row(state, sid)
                            for sid in sorted(state.schedules)
                            if state.schedules[sid].quota == q.id
                        ],
                    }
                    for q in state.quotas.values()
                ]
            }

    @app.get("/schedules/{schedule_id}")
    def get_schedule(schedule_id: str, x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            if schedule_id not in platform.state.schedules:
                raise UnknownEntity(schedule_id)
            return _schedule_row(platform.state, schedule_id)

    @app.get("/entitlements")
    def list_entitlements(
        beneficiary: str | None = None,
        schedule: str | None = None,
        x_org_user: str | None = Header(default=None),
    ):
        authenticated(x_org_user)
        with platform.lock:
            rows = [
                {
                    "beneficiary": e.beneficiary,
                    "schedule": e.schedule,
                    "period_index": e.period_index,
                    "charged_at": e.charged_at.isoformat(),
                    "status": e.status,
                }
                for _, e in sorted(platform.state.entitlements.items())
                if (beneficiary is None or e.beneficiary == beneficiary)
                and (schedule is None or e.schedule == schedule)
            ]
            return {"entitlements": rows}

    @app.get("/sessions")
    def list_sessions(x_org_user: str | None = Header(default=None)):
        authenticated(x_org_user)
        with platform.lock:
            return {
                "sessions": [
                    {
                        "id": s.id,
                        "scenario": s.scenario,
                        "beneficiary": s.beneficiary,
                        "merchant": s.merchant,
                        "voucher": s.voucher,
                        "phase": s.phase,
                        "outcome": s.outcome,
                        "deadline": s.deadline.isoformat(),
                    }
                    for _, s in sorted(platform.orchestrator.sessions.items())
                ]
            }

    @app.get("/state")
    def get_state(x_org_user: str | None = Header(default=None)):
        platform._authorize(x_org_user, "snapshot")
        with platform.lock:
            return Response(platform.state.canonical(), media_type="application/json")

    @app.get("/journal")
    def get_journal(x_org_user: str | None = Header(default=None)):
        platform._authorize(x_org_user, "reports")
        with platform.lock:
            return {"lines": platform.journal.lines()}

    @app.post("/snapshots")
    def take_snapshot(x_org_user: str | None = Header(default=None)):
        path = platform.snapshot(x_org_user)
        return {"path": str(path), "as_of_seq": platform.journal.last_seq}

    def _beneficiary_row(b) -> dict:
        return {
            "id": b.id,
            "national_id": b.national_id,
            "address": b.address,
            "region": b.region.render(),
            "mobile": b.mobile,
            "family_size": b.family_size,
            "preferred_merchant": b.preferred_merchant,
            "channel_profile": b.channel_profile,
            "cash_balance": b.cash_balance.render(),
        }

    def _schedule_row(state, schedule_id: str) -> dict:
        s = state.schedules[schedule_id]
        return {
            "id": s.id,
            "quota": s.quota,
            "periodicity": s.periodicity,
            "valid_from": s.valid_from.isoformat(),
            "valid_to": s.valid_to.isoformat(),
            "max_persons": s.max_persons,
            "items": [
                {
                    "item_id": i.item_id,
                    "name": i.name,
                    "unit": i.unit,
                    "qty_per_person": i.qty_per_person.render(),
                    "unit_merchant_price": i.unit_merchant_price.render(),
                    "unit_consumer_price": i.unit_consumer_price.render(),
                    "unit_org_cost": i.unit_org_cost.render(),
                }
                for i in state.items.get(schedule_id, [])
            ],
        }

    return app
