// Back-office console bootstrap. Everything testable lives in the other
// modules; this file only wires them to the document.

import { Api, ApiError } from "./api";
import { FormRejected, submitItems, submitSchedule } from "./forms";
import { startMonitor } from "./monitor";
import { renderRegionReport, renderSettlementReport, renderSubsidyReport } from "./reports";
import { ItemForm, ScheduleForm } from "./validate";

const PAGE = `
  <h1>quotaflow console</h1>
  <section id="schedule">
    <h2>New schedule</h2>
    <form id="schedule-form">
      <input name="quota" placeholder="Quota id (Q1)" required>
      <select name="periodicity">
        <option>Once</option><option>Daily</option><option>Weekly</option>
        <option selected>Monthly</option><option>Yearly</option>
      </select>
      <input name="valid_from" placeholder="2024-01-01">
      <input name="valid_to" placeholder="2024-12-31">
      <input name="max_persons" placeholder="persons cap (blank = none)">
      <textarea name="items" rows="4"
        placeholder="one item per line: name | unit | qty | merchant | consumer | org-cost"></textarea>
      <button type="submit">Create</button>
      <p id="schedule-issues" class="error"></p>
    </form>
  </section>
  <section id="monitor">
    <h2>Vouchers</h2>
    <input id="monitor-state" placeholder="filter: state">
    <div id="monitor-table"></div>
  </section>
  <section id="reports">
    <h2>Reports</h2>
    <input id="report-quota" placeholder="Q1">
    <input id="report-merchant" placeholder="M1">
    <input id="report-org" placeholder="G1">
    <input id="report-period" value="0">
    <button id="report-load">Load</button>
    <div id="report-tables"></div>
  </section>
`;

function parseItemLines(text: string): ItemForm[] {
  return text
    .split("\n")
    .map((line) => line.trim())
    .filter(Boolean)
    .map((line) => {
      const [name = "", unit = "", qty = "", merch = "", cons = "", cost = ""] = line
        .split("|")
        .map((p) => p.trim());
      return {
        name,
        unit,
        qty_per_person: qty,
        unit_merchant_price: merch,
        unit_consumer_price: cons,
        unit_org_cost: cost,
      };
    });
}

export function mount(root: HTMLElement, api: Api): void {
  root.innerHTML = PAGE;
  const $ = <T extends HTMLElement>(sel: string) => root.querySelector<T>(sel)!;

  $<HTMLFormElement>("#schedule-form").addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const data = new FormData(ev.target as HTMLFormElement);
    const field = (name: string) => String(data.get(name) ?? "");
    const form: ScheduleForm = {
      periodicity: field("periodicity"),
      valid_from: field("valid_from"),
      valid_to: field("valid_to"),
      max_persons: field("max_persons"),
    };
    const out = $("#schedule-issues");
    try {
      const schedule = await submitSchedule(api, field("quota"), form);
      const items = parseItemLines(field("items"));
      if (items.length) await submitItems(api, schedule.id, items);
      out.textContent = `created ${schedule.id}`;
    } catch (err) {
      if (err instanceof FormRejected) {
        out.textContent = err.issues.map((i) => `${i.field}: ${i.message}`).join("\n");
      } else if (err instanceof ApiError) {
        out.textContent = `${err.reason}: ${err.detail}`;
      } else {
        out.textContent = String(err);
      }
    }
  });

  let stop = startMonitor(api, $("#monitor-table"));
  $<HTMLInputElement>("#monitor-state").addEventListener("change", (ev) => {
    stop();
    const state = (ev.target as HTMLInputElement).value.trim();
    stop = startMonitor(api, $("#monitor-table"), state ? { state } : {});
  });

  $("#report-load").addEventListener("click", async () => {
    const period = Number($<HTMLInputElement>("#report-period").value) || 0;
    const tables = $("#report-tables");
    try {
      const [region, settlement, subsidy] = await Promise.all([
        api.regionDistribution($<HTMLInputElement>("#report-quota").value, period),
        api.settlement($<HTMLInputElement>("#report-merchant").value, period),
        api.subsidyCost($<HTMLInputElement>("#report-org").value, period),
      ]);
      tables.innerHTML =
        renderRegionReport(region) +
        renderSettlementReport(settlement) +
        renderSubsidyReport(subsidy);
    } catch (err) {
      tables.innerHTML = `<p class="error">${String(err)}</p>`;
    }
  });
}

declare global {
  interface Window {
    QUOTAFLOW_BASE_URL?: string;
    QUOTAFLOW_ACTOR?: string;
  }
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    mount(root, new Api(window.QUOTAFLOW_BASE_URL ?? "http://127.0.0.1:8000", window.QUOTAFLOW_ACTOR));
  }
}
