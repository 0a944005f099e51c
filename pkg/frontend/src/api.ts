// Typed client for the quotaflow HTTP service. Money and quantities stay
// strings end to end; the server renders them canonically.

export interface ItemRow {
  item_id: string;
  name: string;
  unit: string;
  qty_per_person: string;
  unit_merchant_price: string;
  unit_consumer_price: string;
  unit_org_cost: string;
}

export interface ScheduleRow {
  id: string;
  quota: string;
  periodicity: string;
  valid_from: string;
  valid_to: string;
  max_persons: number | null;
  items: ItemRow[];
}

export interface QuotaRow {
  id: string;
  org: string;
  code: string;
  name: string;
  basis: string;
  notify_on_charge: boolean;
  category: string;
  schedules: ScheduleRow[];
}

export interface VoucherDetailRow {
  item_id: string;
  formal_qty: string;
  actual_qty: string;
  unit_merchant_price: string;
  unit_consumer_price: string;
  unit_org_cost: string;
}

export interface VoucherRow {
  id: string;
  beneficiary: string;
  region: string;
  quota: string;
  schedule: string;
  period_index: number;
  merchant: string;
  state: string;
  opened_at: string;
  closed_at: string | null;
  total_merchant_price: string;
  total_consumer_price: string;
  details: VoucherDetailRow[];
}

export interface RegionReport {
  quota: string;
  period: number;
  rows: {
    region: string;
    item: string;
    total_formal: string;
    total_actual: string;
    refund_value: string;
    leave_rate: string;
  }[];
}

export interface SettlementReport {
  merchant: string;
  period: number;
  vouchers: { voucher: string; settlement: string; profit: string }[];
  total_settlement: string;
  total_profit: string;
}

export interface SubsidyReport {
  organization: string;
  period: number;
  rows: {
    item: string;
    delivered_value: string;
    refund_value: string;
    subsidy_cost: string;
  }[];
  total: string;
}

export interface MonitorFilters {
  state?: string;
  schedule?: string;
  region?: string;
  merchant?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
    public detail: string,
  ) {
    super(`${reason}: ${detail}`);
  }
}

export class Api {
  constructor(
    private baseUrl: string,
    private actor?: string,
  ) {}

  private headers(): Record<string, string> {
    const h: Record<string, string> = { "Content-Type": "application/json" };
    if (this.actor) h["X-Org-User"] = this.actor;
    return h;
  }

  private async take<T>(response: Response): Promise<T> {
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body.reason ?? "Unknown", body.detail ?? "");
    }
    return body as T;
  }

  async get<T>(path: string, params?: Record<string, string>): Promise<T> {
    const url = new URL(this.baseUrl + path);
    for (const [k, v] of Object.entries(params ?? {})) url.searchParams.set(k, v);
    return this.take<T>(await fetch(url, { headers: this.headers() }));
  }

  async post<T>(path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: this.headers(),
      body: body === undefined ? null : JSON.stringify(body),
    });
    return this.take<T>(response);
  }

  // --- write side ---------------------------------------------------------

  createOrg(name: string, kind: string): Promise<{ id: string }> {
    return this.post("/orgs", { name, kind });
  }

  createOrgUser(org: string, role: string): Promise<{ id: string }> {
    return this.post("/org-users", { org, role });
  }

  registerMerchant(name: string, region: string, categories: string[]): Promise<{ id: string }> {
    return this.post("/merchants", { name, region, categories });
  }

  registerBeneficiary(fields: Record<string, unknown>): Promise<{ id: string }> {
    return this.post("/beneficiaries", fields);
  }

  defineQuota(body: {
    name: string;
    basis: string;
    notify_on_charge?: boolean;
    category?: string;
  }): Promise<{ id: string }> {
    return this.post("/quotas", body);
  }

  defineSchedule(quotaId: string, body: unknown): Promise<{ id: string }> {
    return this.post(`/quotas/${quotaId}/schedules`, body);
  }

  setItems(scheduleId: string, items: unknown[]): Promise<unknown> {
    return this.post(`/schedules/${scheduleId}/items`, { items });
  }

  // --- read side ----------------------------------------------------------

  async listQuotas(): Promise<QuotaRow[]> {
    const doc = await this.get<{ quotas: QuotaRow[] }>("/quotas");
    return doc.quotas;
  }

  getSchedule(scheduleId: string): Promise<ScheduleRow> {
    return this.get(`/schedules/${scheduleId}`);
  }

  async vouchers(filters: MonitorFilters = {}): Promise<VoucherRow[]> {
    const params: Record<string, string> = {};
    for (const [k, v] of Object.entries(filters)) if (v) params[k] = v;
    const doc = await this.get<{ vouchers: VoucherRow[] }>("/vouchers", params);
    return doc.vouchers;
  }

  regionDistribution(quota: string, period: number): Promise<RegionReport> {
    return this.get("/reports/region-distribution", { quota, period: String(period) });
  }

  settlement(merchant: string, period: number): Promise<SettlementReport> {
    return this.get("/reports/settlement", { merchant, period: String(period) });
  }

  subsidyCost(org: string, period: number): Promise<SubsidyReport> {
    return this.get("/reports/subsidy-cost", { org, period: String(period) });
  }

  clock(): Promise<{ now: string }> {
    return this.get("/clock");
  }
}
