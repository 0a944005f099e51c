// Report views: plain tables over the three journal-fold reports.

import { RegionReport, SettlementReport, SubsidyReport } from "./api";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderRegionReport(doc: RegionReport): string {
  const body = doc.rows
    .map(
      (r) => `<tr><td>${esc(r.region)}</td><td>${esc(r.item)}</td>
      <td class="num">${esc(r.total_formal)}</td><td class="num">${esc(r.total_actual)}</td>
      <td class="num">${esc(r.refund_value)}</td><td class="num">${esc(r.leave_rate)}</td></tr>`,
    )
    .join("");
  return `<table class="report">
    <caption>Distribution — ${esc(doc.quota)} period ${doc.period}</caption>
    <thead><tr><th>Region</th><th>Item</th><th>Entitled</th><th>Delivered</th>
    <th>Refunded</th><th>Leave rate</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderSettlementReport(doc: SettlementReport): string {
  const body = doc.vouchers
    .map(
      (v) => `<tr><td>${esc(v.voucher)}</td>
      <td class="num">${esc(v.settlement)}</td><td class="num">${esc(v.profit)}</td></tr>`,
    )
    .join("");
  return `<table class="report">
    <caption>Settlement — ${esc(doc.merchant)} period ${doc.period}</caption>
    <thead><tr><th>Voucher</th><th>Settlement</th><th>Profit</th></tr></thead>
    <tbody>${body}</tbody>
    <tfoot><tr><td>Total</td><td class="num">${esc(doc.total_settlement)}</td>
    <td class="num">${esc(doc.total_profit)}</td></tr></tfoot>
  </table>`;
}

export function renderSubsidyReport(doc: SubsidyReport): string {
  const body = doc.rows
    .map(
      (r) => `<tr><td>${esc(r.item)}</td><td class="num">${esc(r.delivered_value)}</td>
      <td class="num">${esc(r.refund_value)}</td><td class="num">${esc(r.subsidy_cost)}</td></tr>`,
    )
    .join("");
  return `<table class="report">
    <caption>Subsidy cost — ${esc(doc.organization)} period ${doc.period}</caption>
    <thead><tr><th>Item</th><th>Delivered value</th><th>Refunds</th><th>Cost</th></tr></thead>
    <tbody>${body}</tbody>
    <tfoot><tr><td>Total</td><td colspan="3" class="num">${esc(doc.total)}</td></tr></tfoot>
  </table>`;
}
