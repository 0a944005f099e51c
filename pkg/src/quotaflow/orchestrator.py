"""Session orchestration: translates channel messages into engine operations.

Each delivery runs inside a Session following one of two roadmaps, chosen by
the beneficiary's channel profile (merchant outlets always run the app):

  text beneficiary: REQ -> merchant adjusts/submits -> CONFIRM text ->
      OK <pin> -> DONE text + receipt frame
  app beneficiary:  request frame -> merchant adjusts/submits ->
      confirm_request frame -> confirm frame with pin -> receipt frames

Sessions are transient working state, never journaled; every ledger effect
they cause flows through the platform's commit path.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import TYPE_CHECKING

from . import channels, delivery, registry
from .errors import (
    ChannelMismatch,
    NoActiveSession,
    NotAppCapable,
    ParseError,
    PhaseViolation,
    QuotaflowError,
    SessionActive,
    UnknownBeneficiary,
    UnknownMerchant,
    UnknownQuota,
    UnsupportedCombination,
    ValidationError,
)
from .money import Quantity
from .quota import OPEN, entitlement_key, period_index

if TYPE_CHECKING:
    from .platform import Platform

TEXT_BENEFICIARY = "TextBeneficiary_AppMerchant"
APP_BENEFICIARY = "AppBeneficiary_AppMerchant"

AWAIT_MERCHANT_ADJUST = "AwaitMerchantAdjust"
AWAIT_BENEFICIARY_CONFIRM = "AwaitBeneficiaryConfirm"
CLOSED = "Closed"

DELIVERED = "Delivered"
ABANDONED = "Abandoned"
TIMED_OUT = "TimedOut"
FAILED = "Failed"

SESSION_TIMEOUT = timedelta(minutes=15)
MAX_PIN_FAILURES = 3

# Exception class -> short code used in ERR texts and error frames.
SHORT_CODES = {
    "ParseError": "PARSE",
    "InvalidPin": "BAD_PIN",
    "NoOpenEntitlement": "NO_ENTITLEMENT",
    "DuplicateVoucher": "DUPLICATE",
    "UnknownQuota": "UNKNOWN_QUOTA",
    "UnknownMerchant": "UNKNOWN_MERCHANT",
    "UnknownItem": "UNKNOWN_ITEM",
    "UnknownBeneficiary": "UNKNOWN_SENDER",
    "CategoryMismatch": "CATEGORY",
    "QuantityOutOfRange": "QTY_RANGE",
    "PhaseViolation": "PHASE",
    "NoActiveSession": "NO_SESSION",
    "SessionActive": "SESSION_ACTIVE",
    "NotAppCapable": "NOT_APP",
    "UnsupportedCombination": "UNSUPPORTED",
    "VoucherClosed": "CLOSED",
    "ChannelMismatch": "CHANNEL",
    "ValidationError": "INVALID",
}


def _frame_qty(value) -> Quantity:
    try:
        return Quantity.parse(str(value))
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def short_code(exc: QuotaflowError) -> str:
    return SHORT_CODES.get(exc.code, "FAILED")


def select_scenario(beneficiary_profile: str, merchant_profile: str) -> str:
    if merchant_profile != registry.APP_CAPABLE:
        raise UnsupportedCombination("merchant outlet must run the app")
    if beneficiary_profile == registry.TEXT_ONLY:
        return TEXT_BENEFICIARY
    return APP_BENEFICIARY


@dataclass
class Session:
    id: str
    scenario: str
    beneficiary: str
    merchant: str
    voucher: str
    phase: str
    started_at: datetime
    deadline: datetime
    outcome: str | None = None
    pin_failures: int = 0


@dataclass(frozen=True)
class OutboundAction:
    target: str  # actor id
    channel: str  # "text" | "app"
    payload: str | dict  # text body | frame message
    mobile: str | None = None


class Orchestrator:
    def __init__(self, platform: "Platform"):
        self.platform = platform
        self.sessions: dict[str, Session] = {}
        self.active_by_beneficiary: dict[str, str] = {}
        self._session_counter = 0

    # --- helpers -----------------------------------------------------------

    @property
    def state(self):
        return self.platform.state

    def _text(self, beneficiary_id: str, body: str) -> OutboundAction:
        b = self.state.beneficiaries[beneficiary_id]
        return OutboundAction(beneficiary_id, "text", body, mobile=b.mobile)

    def _frame(self, actor_id: str, kind: str, session: str | None, body: dict) -> OutboundAction:
        return OutboundAction(actor_id, "app", {"kind": kind, "session": session, "body": body})

    def _notice(self, beneficiary_id: str, make_text, make_frame) -> OutboundAction:
        b = self.state.beneficiaries[beneficiary_id]
        if b.channel_profile == registry.TEXT_ONLY:
            return self._text(beneficiary_id, make_text())
        kind, session, body = make_frame()
        return self._frame(beneficiary_id, kind, session, body)

    def _active_session(self, beneficiary_id: str) -> Session | None:
        sid = self.active_by_beneficiary.get(beneficiary_id)
        return self.sessions.get(sid) if sid else None

    def _close(self, session: Session, outcome: str) -> None:
        session.phase = CLOSED
        session.outcome = outcome
        self.active_by_beneficiary.pop(session.beneficiary, None)

    def _voucher_body(self, voucher_id: str, full: bool) -> dict:
        v = self.state.vouchers[voucher_id]
        r = delivery.compute_receipt(v)
        body = {
            "voucher": v.id,
            "beneficiary": v.beneficiary,
            "merchant": v.merchant,
            "quota": self.state.quotas[v.quota].code,
            "items": [
                {
                    "item_id": d.item_id,
                    "formal_qty": d.formal_qty.render(),
                    "actual_qty": d.actual_qty.render(),
                    "unit_merchant_price": d.unit_merchant_price.render(),
                    "unit_consumer_price": d.unit_consumer_price.render(),
                }
                for d in v.details
            ],
            "consumer_due": r.consumer_due.render(),
            "refund": r.refund.render(),
        }
        if full:
            body["merchant_settlement"] = r.merchant_settlement.render()
            body["merchant_profit"] = r.merchant_profit.render()
        return body

    def _cancel_session(self, session: Session, outcome: str, reason: str) -> list[OutboundAction]:
        v = self.state.vouchers.get(session.voucher)
        if v is not None and v.state == delivery.NOT_DELIVERED:
            self.platform.commit(
                [("VoucherCancelled", delivery.cancel_voucher_payload(self.state, v.id, reason))]
            )
        self._close(session, outcome)
        return [
            self._notice(
                session.beneficiary,
                lambda: channels.compose_cancelled(session.voucher),
                lambda: ("cancelled", session.id, {"voucher": session.voucher, "reason": reason}),
            ),
            self._frame(
                session.merchant,
                "cancelled",
                session.id,
                {"voucher": session.voucher, "reason": reason},
            ),
        ]

    # --- inbound: text channel ----------------------------------------------

    def handle_text(self, mobile: str, body: str, now: datetime) -> list[OutboundAction]:
        sender = next(
            (b for b in self.state.beneficiaries.values() if b.mobile == mobile), None
        )
        if sender is None:
            return [OutboundAction("", "text", channels.compose_err("UNKNOWN_SENDER"), mobile=mobile)]
        try:
            message = channels.parse_text(body)
            return self._dispatch_text(sender.id, message, now)
        except QuotaflowError as exc:
            return [
                OutboundAction(
                    sender.id,
                    "text",
                    channels.compose_err(short_code(exc)),
                    mobile=mobile,
                )
            ]

    def _dispatch_text(self, beneficiary_id: str, message, now: datetime) -> list[OutboundAction]:
        if isinstance(message, channels.BalanceQuery):
            balance = self.state.beneficiaries[beneficiary_id].cash_balance
            return [self._text(beneficiary_id, channels.compose_balance(balance))]
        if isinstance(message, channels.Request):
            profile = self.state.beneficiaries[beneficiary_id].channel_profile
            if profile != registry.TEXT_ONLY:
                raise ChannelMismatch("app-profiled beneficiary must request in the app")
            items = dict(message.items) if message.items is not None else None
            self._start_session(
                beneficiary_id, message.quota_code, message.merchant_code, items, now
            )
            session = self._active_session(beneficiary_id)
            return [
                self._frame(
                    session.merchant, "draft", session.id, self._voucher_body(session.voucher, full=False)
                )
            ]
        session = self._active_session(beneficiary_id)
        if session is None:
            raise NoActiveSession("no delivery in progress")
        if isinstance(message, channels.Abandon):
            return self._cancel_session(session, ABANDONED, "abandoned")
        # channels.Confirm
        if session.phase != AWAIT_BENEFICIARY_CONFIRM:
            raise PhaseViolation(f"confirmation not expected in {session.phase}")
        return self._confirm(session, message.pin, now)

    # --- inbound: app channel -------------------------------------------------

    def handle_frame(self, message: dict, now: datetime) -> list[OutboundAction]:
        kind = message.get("kind")
        session_id = message.get("session")
        body = message.get("body") or {}
        actor = body.get("beneficiary") or body.get("merchant") or ""
        try:
            if kind == "join":
                return self._join(body)
            if kind == "request":
                return self._app_request(body, now)
            if kind not in ("adjust", "submit", "confirm", "abandon"):
                raise ParseError(1, f"unknown frame kind {kind!r}")
            session = self.sessions.get(session_id or "")
            if session is None or session.phase == CLOSED:
                raise NoActiveSession(f"no live session {session_id!r}")
            if kind == "adjust":
                return self._adjust(session, body, now)
            if kind == "submit":
                return self._submit(session, now)
            if kind == "confirm":
                actor = actor or session.beneficiary
                return self._app_confirm(session, body, now)
            actor = actor or session.beneficiary
            return self._cancel_session(session, ABANDONED, "abandoned")
        except QuotaflowError as exc:
            return [
                self._frame(
                    actor,
                    "error",
                    session_id,
                    {"code": short_code(exc), "detail": exc.detail},
                )
            ]

    def _join(self, body: dict) -> list[OutboundAction]:
        beneficiary_id = body.get("beneficiary", "")
        payload = self.first_join_sync(beneficiary_id)
        return [self._frame(beneficiary_id, "catalog", None, payload)]

    def _app_request(self, body: dict, now: datetime) -> list[OutboundAction]:
        beneficiary_id = body.get("beneficiary", "")
        b = self.state.beneficiaries.get(beneficiary_id)
        if b is None:
            raise UnknownBeneficiary(beneficiary_id)
        if b.channel_profile != registry.APP_CAPABLE:
            raise ChannelMismatch("text-profiled beneficiary must request by text")
        items = None
        if body.get("items") is not None:
            items = {code.upper(): _frame_qty(qty) for code, qty in body["items"].items()}
        self._start_session(beneficiary_id, body.get("quota", ""), body.get("merchant"), items, now)
        session = self._active_session(beneficiary_id)
        return [
            self._frame(
                session.merchant, "draft", session.id, self._voucher_body(session.voucher, full=False)
            )
        ]

    def _adjust(self, session: Session, body: dict, now: datetime) -> list[OutboundAction]:
        if session.phase != AWAIT_MERCHANT_ADJUST:
            raise PhaseViolation(f"adjustment not expected in {session.phase}")
        payload = delivery.update_qty_payload(
            self.state,
            session.voucher,
            str(body.get("item_id", "")).upper(),
            _frame_qty(body.get("actual_qty", "")),
        )
        self.platform.commit([("QtyUpdated", payload)])
        session.deadline = now + SESSION_TIMEOUT
        return [
            self._frame(
                session.merchant, "draft", session.id, self._voucher_body(session.voucher, full=False)
            )
        ]

    def _submit(self, session: Session, now: datetime) -> list[OutboundAction]:
        if session.phase != AWAIT_MERCHANT_ADJUST:
            raise PhaseViolation(f"submit not expected in {session.phase}")
        session.phase = AWAIT_BENEFICIARY_CONFIRM
        session.deadline = now + SESSION_TIMEOUT
        v = self.state.vouchers[session.voucher]
        r = delivery.compute_receipt(v)
        if session.scenario == TEXT_BENEFICIARY:
            return [
                self._text(
                    session.beneficiary,
                    channels.compose_confirm(v.id, r.consumer_due, r.refund),
                )
            ]
        return [
            self._frame(
                session.beneficiary,
                "confirm_request",
                session.id,
                self._voucher_body(v.id, full=False),
            )
        ]

    def _app_confirm(self, session: Session, body: dict, now: datetime) -> list[OutboundAction]:
        if session.phase != AWAIT_BENEFICIARY_CONFIRM:
            raise PhaseViolation(f"confirmation not expected in {session.phase}")
        return self._confirm(session, str(body.get("pin", "")), now)

    # --- shared flow ------------------------------------------------------------

    def _start_session(
        self,
        beneficiary_id: str,
        quota_code: str,
        merchant_code: str | None,
        items: dict[str, Quantity] | None,
        now: datetime,
    ) -> None:
        if self._active_session(beneficiary_id) is not None:
            raise SessionActive("a delivery is already in progress")
        b = self.state.beneficiaries[beneficiary_id]
        quota = next((q for q in self.state.quotas.values() if q.code == quota_code), None)
        if quota is None:
            raise UnknownQuota(quota_code)
        merchant_id = merchant_code or b.preferred_merchant
        if merchant_id is None or merchant_id not in self.state.merchants:
            raise UnknownMerchant(merchant_id or "no merchant named or preferred")
        scenario = select_scenario(b.channel_profile, registry.APP_CAPABLE)
        schedule_id = self._claimable_schedule(beneficiary_id, quota.id, now)
        payload = delivery.open_voucher_payload(
            self.state, beneficiary_id, merchant_id, quota.id, schedule_id, now, items
        )
        self.platform.commit([("VoucherOpened", payload)])
        self._session_counter += 1
        session = Session(
            id=f"T{self._session_counter}",
            scenario=scenario,
            beneficiary=beneficiary_id,
            merchant=merchant_id,
            voucher=payload["id"],
            phase=AWAIT_MERCHANT_ADJUST,
            started_at=now,
            deadline=now + SESSION_TIMEOUT,
        )
        self.sessions[session.id] = session
        self.active_by_beneficiary[beneficiary_id] = session.id

    def _claimable_schedule(self, beneficiary_id: str, quota_id: str, now: datetime) -> str:
        """The quota's schedule this beneficiary can claim right now.

        Falls back to the first in-window schedule so open_voucher_payload
        reports the precise failure (duplicate vs. nothing open).
        """
        candidates = [
            s for s in sorted(self.state.schedules) if self.state.schedules[s].quota == quota_id
        ]
        in_window = [
            s
            for s in candidates
            if period_index(self.state.schedules[s], now.date()) is not None
        ]
        for sid in in_window:
            pi = period_index(self.state.schedules[sid], now.date())
            ent = self.state.entitlements.get(entitlement_key(beneficiary_id, sid, pi))
            if ent is not None and ent.status == OPEN:
                return sid
        if in_window:
            return in_window[0]
        if candidates:
            return candidates[0]
        raise UnknownQuota(f"{quota_id} has no schedule")

    def _confirm(self, session: Session, pin: str, now: datetime) -> list[OutboundAction]:
        if not registry.is_valid_consumer(self.state, session.beneficiary, pin):
            session.pin_failures += 1
            if session.pin_failures >= MAX_PIN_FAILURES:
                return self._cancel_session(session, FAILED, "pin_failures")
            if session.scenario == TEXT_BENEFICIARY:
                return [self._text(session.beneficiary, channels.compose_err("BAD_PIN"))]
            return [
                self._frame(
                    session.beneficiary,
                    "error",
                    session.id,
                    {"code": "BAD_PIN", "detail": "pin rejected"},
                )
            ]
        decided = delivery.confirm_decisions(self.state, session.voucher)
        self.platform.commit(decided)
        self._close(session, DELIVERED)
        v = self.state.vouchers[session.voucher]
        r = delivery.compute_receipt(v)
        actions = []
        if session.scenario == TEXT_BENEFICIARY:
            actions.append(
                self._text(
                    session.beneficiary,
                    channels.compose_done(
                        v.id, [(d.item_id, d.actual_qty) for d in v.details], r.refund
                    ),
                )
            )
        else:
            actions.append(
                self._frame(
                    session.beneficiary, "receipt", session.id, self._voucher_body(v.id, full=False)
                )
            )
        actions.append(
            self._frame(session.merchant, "receipt", session.id, self._voucher_body(v.id, full=True))
        )
        return actions

    # --- notifications and housekeeping ----------------------------------------

    def notify_charged(self, beneficiary_id: str, schedule_id: str, pi: int) -> OutboundAction:
        sched = self.state.schedules[schedule_id]
        code = self.state.quotas[sched.quota].code
        return self._notice(
            beneficiary_id,
            lambda: channels.compose_charged(code, pi),
            lambda: ("charged", None, {"quota": code, "period_index": pi}),
        )

    def expire_sessions(self, now: datetime) -> list[OutboundAction]:
        actions = []
        for sid in sorted(self.sessions):
            session = self.sessions[sid]
            if session.phase != CLOSED and now >= session.deadline:
                actions.extend(self._cancel_session(session, TIMED_OUT, "timeout"))
        return actions

    def first_join_sync(self, beneficiary_id: str) -> dict:
        state = self.state
        b = state.beneficiaries.get(beneficiary_id)
        if b is None:
            raise UnknownBeneficiary(beneficiary_id)
        if b.channel_profile != registry.APP_CAPABLE:
            raise NotAppCapable(f"{beneficiary_id} is text-only")
        schedules = []
        for sid in sorted(state.schedules):
            sched = state.schedules[sid]
            quota = state.quotas[sched.quota]
            schedules.append(
                {
                    "schedule": sid,
                    "quota": quota.code,
                    "quota_name": quota.name,
                    "basis": quota.basis,
                    "periodicity": sched.periodicity,
                    "valid_from": sched.valid_from.isoformat(),
                    "valid_to": sched.valid_to.isoformat(),
                    "max_persons": sched.max_persons,
                    "items": [
                        {
                            "item_id": i.item_id,
                            "name": i.name,
                            "unit": i.unit,
                            "qty_per_person": i.qty_per_person.render(),
                            "unit_merchant_price": i.unit_merchant_price.render(),
                            "unit_consumer_price": i.unit_consumer_price.render(),
                        }
                        for i in state.items.get(sid, [])
                    ],
                }
            )
        entitlements = [
            {
                "schedule": e.schedule,
                "period_index": e.period_index,
                "status": e.status,
            }
            for key, e in sorted(state.entitlements.items())
            if e.beneficiary == beneficiary_id and e.status == OPEN
        ]
        return {
            "beneficiary": beneficiary_id,
            "preferred_merchant": b.preferred_merchant,
            "cash_balance": b.cash_balance.render(),
            "schedules": schedules,
            "entitlements": entitlements,
        }
