// Live voucher monitor: render rows as a table and keep them fresh by polling.

import { Api, MonitorFilters, VoucherRow } from "./api";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function renderVoucherTable(rows: VoucherRow[]): string {
  if (rows.length === 0) {
    return `<p class="empty">No vouchers match.</p>`;
  }
  const body = rows
    .map((v) => {
      const items = v.details
        .map((d) => `${esc(d.item_id)} ${esc(d.actual_qty)}/${esc(d.formal_qty)}`)
        .join(", ");
      return `<tr class="state-${v.state.toLowerCase()}">
        <td>${esc(v.id)}</td><td>${esc(v.beneficiary)}</td><td>${esc(v.region)}</td>
        <td>${esc(v.merchant)}</td><td>${esc(v.schedule)} P${v.period_index}</td>
        <td>${esc(v.state)}</td><td>${items}</td>
        <td class="num">${esc(v.total_consumer_price)}</td>
      </tr>`;
    })
    .join("");
  return `<table class="vouchers">
    <thead><tr><th>Voucher</th><th>Beneficiary</th><th>Region</th><th>Merchant</th>
    <th>Period</th><th>State</th><th>Items (taken/entitled)</th><th>Due</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export interface Sink {
  innerHTML: string;
}

/** Poll the monitor endpoint into `sink`; returns a stop function. */
export function startMonitor(
  api: Api,
  sink: Sink,
  filters: MonitorFilters = {},
  intervalMs = 2000,
): () => void {
  let stopped = false;
  const tick = async () => {
    if (stopped) return;
    try {
      sink.innerHTML = renderVoucherTable(await api.vouchers(filters));
    } catch (err) {
      sink.innerHTML = `<p class="error">${esc(String(err))}</p>`;
    }
  };
  void tick();
  const timer = setInterval(tick, intervalMs);
  return () => {
    stopped = true;
    clearInterval(timer);
  };
}
