"""Reporting: every report is a pure fold over the journal.

No live-state reads — rerunning a report after a restart or replay yields
byte-identical output, which is what makes the ledger auditable.
"""

from __future__ import annotations

from .journal import Journal
from .money import Money, Quantity, _round_half_up


def _fold_context(journal: Journal) -> tuple[dict, dict, dict]:
    """(beneficiary regions, voucher headers+price snapshots, quota orgs)."""
    regions: dict[str, str] = {}
    vouchers: dict[str, dict] = {}
    quota_orgs: dict[str, str] = {}
    for event in journal.events():
        if event.kind == "BeneficiaryRegistered":
            p = event.payload
            regions[p["id"]] = f"{p['region']['zone']}:{p['region']['name']}"
        elif event.kind == "QuotaDefined":
            quota_orgs[event.payload["id"]] = event.payload["org"]
        elif event.kind == "VoucherOpened":
            p = event.payload
            vouchers[p["id"]] = {
                "beneficiary": p["beneficiary"],
                "quota": p["quota"],
                "schedule": p["schedule"],
                "period_index": p["period_index"],
                "merchant": p["merchant"],
                "gaps": {
                    d["item_id"]: d["unit_merchant_price"] - d["unit_consumer_price"]
                    for d in p["details"]
                },
            }
    return regions, vouchers, quota_orgs


def _line_value(qty_millis: int, price_piasters: int) -> int:
    return _round_half_up(qty_millis * price_piasters, 1000)


def _leave_rate(formal_millis: int, actual_millis: int) -> str:
    if formal_millis == 0:
        return "0.0000"
    scaled = _round_half_up((formal_millis - actual_millis) * 10_000, formal_millis)
    return f"{scaled // 10_000}.{scaled % 10_000:04d}"


def region_distribution(journal: Journal, quota_id: str, period: int) -> dict:
    """Per (region, item): delivered vs. entitled quantities and leave rate."""
    regions, vouchers, _ = _fold_context(journal)
    acc: dict[tuple[str, str], dict] = {}
    for event in journal.events():
        if event.kind != "DeliveryConfirmed":
            continue
        head = vouchers[event.payload["voucher"]]
        if head["quota"] != quota_id or head["period_index"] != period:
            continue
        region = regions[head["beneficiary"]]
        for item in event.payload["items"]:
            key = (region, item["item_id"])
            row = acc.setdefault(key, {"formal": 0, "actual": 0, "refund": 0})
            row["formal"] += item["formal_qty"]
            row["actual"] += item["actual_qty"]
            gap = head["gaps"][item["item_id"]]
            row["refund"] += _line_value(item["formal_qty"] - item["actual_qty"], gap)
    rows = [
        {
            "region": region,
            "item": item,
            "total_formal": Quantity(v["formal"]).render(),
            "total_actual": Quantity(v["actual"]).render(),
            "refund_value": Money(v["refund"]).render(),
            "leave_rate": _leave_rate(v["formal"], v["actual"]),
        }
        for (region, item), v in sorted(acc.items())
    ]
    return {"quota": quota_id, "period": period, "rows": rows}


def settlement(journal: Journal, merchant_id: str, period: int) -> dict:
    """Per delivered voucher: what the organization owes the merchant."""
    _, vouchers, _ = _fold_context(journal)
    rows = []
    total_settlement = total_profit = 0
    for event in journal.events():
        if event.kind != "DeliveryConfirmed":
            continue
        head = vouchers[event.payload["voucher"]]
        if head["merchant"] != merchant_id or head["period_index"] != period:
            continue
        p = event.payload
        rows.append(
            {
                "voucher": p["voucher"],
                "settlement": Money(p["merchant_settlement"]).render(),
                "profit": Money(p["merchant_profit"]).render(),
            }
        )
        total_settlement += p["merchant_settlement"]
        total_profit += p["merchant_profit"]
    return {
        "merchant": merchant_id,
        "period": period,
        "vouchers": rows,
        "total_settlement": Money(total_settlement).render(),
        "total_profit": Money(total_profit).render(),
    }


def subsidy_cost(journal: Journal, org_id: str, period: int) -> dict:
    """Per item: subsidy spent on goods delivered plus refunds paid out."""
    _, vouchers, quota_orgs = _fold_context(journal)
    acc: dict[str, dict] = {}
    for event in journal.events():
        if event.kind != "DeliveryConfirmed":
            continue
        head = vouchers[event.payload["voucher"]]
        if quota_orgs.get(head["quota"]) != org_id or head["period_index"] != period:
            continue
        for item in event.payload["items"]:
            gap = head["gaps"][item["item_id"]]
            row = acc.setdefault(item["item_id"], {"delivered": 0, "refund": 0})
            row["delivered"] += _line_value(item["actual_qty"], gap)
            row["refund"] += _line_value(item["formal_qty"] - item["actual_qty"], gap)
    rows = [
        {
            "item": item,
            "delivered_value": Money(v["delivered"]).render(),
            "refund_value": Money(v["refund"]).render(),
            "subsidy_cost": Money(v["delivered"] + v["refund"]).render(),
        }
        for item, v in sorted(acc.items())
    ]
    total = sum(v["delivered"] + v["refund"] for v in acc.values())
    return {"organization": org_id, "period": period, "rows": rows, "total": Money(total).render()}
