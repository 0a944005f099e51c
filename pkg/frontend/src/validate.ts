// Client-side mirrors of the server's date and price rules, so the forms can
// reject bad input before a round trip. Accept/reject must agree with the
// service exactly — the integration test drives both with the same probes.

export interface Issue {
  field: string;
  message: string;
}

export const PERIODICITIES = ["Once", "Daily", "Weekly", "Monthly", "Yearly"];

const MONEY_RE = /^(-?)(\d+)(?:\.(\d{1,2}))?$/;
const QTY_RE = /^(\d+)(?:\.(\d{1,3}))?$/;
const DATE_RE = /^(\d{4})-(\d{2})-(\d{2})$/;

/** Hundredths as an integer, or null when the text is not valid money. */
export function parseMoney(text: string): number | null {
  const m = MONEY_RE.exec(text);
  if (!m) return null;
  const units = Number(m[2]);
  const cents = Number((m[3] ?? "").padEnd(2, "0") || "0");
  const value = units * 100 + cents;
  return m[1] === "-" ? -value : value;
}

/** Thousandths as an integer, or null. Quantities are never negative. */
export function parseQty(text: string): number | null {
  const m = QTY_RE.exec(text);
  if (!m) return null;
  return Number(m[1]) * 1000 + Number((m[2] ?? "").padEnd(3, "0") || "0");
}

/** Strict dashed ISO calendar date (leap years included), like the service. */
export function isValidDate(text: string): boolean {
  const m = DATE_RE.exec(text);
  if (!m) return false;
  const [y, mo, d] = [Number(m[1]), Number(m[2]), Number(m[3])];
  if (mo < 1 || mo > 12 || d < 1) return false;
  const leap = y % 4 === 0 && (y % 100 !== 0 || y % 400 === 0);
  const days = [31, leap ? 29 : 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
  return d <= (days[mo - 1] as number);
}

/** Wire code derived from a display name: uppercase alphanumerics only. */
export function codeFromName(name: string): string {
  return name.toUpperCase().replace(/[^A-Z0-9]/g, "");
}

export interface ScheduleForm {
  periodicity: string;
  valid_from: string;
  valid_to: string;
  max_persons: string; // raw input; empty means no cap
}

export function validateSchedule(form: ScheduleForm): Issue[] {
  const issues: Issue[] = [];
  if (!PERIODICITIES.includes(form.periodicity)) {
    issues.push({ field: "periodicity", message: `unknown periodicity '${form.periodicity}'` });
  }
  if (!isValidDate(form.valid_from)) {
    issues.push({ field: "valid_from", message: "not a calendar date (yyyy-mm-dd)" });
  }
  if (!isValidDate(form.valid_to)) {
    issues.push({ field: "valid_to", message: "not a calendar date (yyyy-mm-dd)" });
  }
  if (isValidDate(form.valid_from) && isValidDate(form.valid_to) && form.valid_to < form.valid_from) {
    issues.push({ field: "valid_to", message: "window ends before it starts" });
  }
  if (form.max_persons.trim() !== "") {
    const n = Number(form.max_persons);
    if (!Number.isInteger(n) || n < 1) {
      issues.push({ field: "max_persons", message: "cap must be a whole number >= 1" });
    }
  }
  return issues;
}

export interface ItemForm {
  name: string;
  unit: string;
  qty_per_person: string;
  unit_merchant_price: string;
  unit_consumer_price: string;
  unit_org_cost: string;
}

export function validateItems(items: ItemForm[]): Issue[] {
  const issues: Issue[] = [];
  const seen = new Set<string>();
  items.forEach((item, i) => {
    const at = (field: string) => `items[${i}].${field}`;
    const code = codeFromName(item.name);
    if (!code) {
      issues.push({ field: at("name"), message: "name yields no usable code" });
    } else if (seen.has(code)) {
      issues.push({ field: at("name"), message: `duplicate item ${code}` });
    }
    seen.add(code);

    const qty = parseQty(item.qty_per_person);
    if (qty === null) {
      issues.push({ field: at("qty_per_person"), message: "quantity must be 0.001-steps" });
    } else if (qty <= 0) {
      issues.push({ field: at("qty_per_person"), message: "quantity must be positive" });
    }

    const prices = {
      unit_merchant_price: parseMoney(item.unit_merchant_price),
      unit_consumer_price: parseMoney(item.unit_consumer_price),
      unit_org_cost: parseMoney(item.unit_org_cost),
    };
    for (const [field, value] of Object.entries(prices)) {
      if (value === null) {
        issues.push({ field: at(field), message: "price must be 0.01-steps" });
      } else if (value < 0) {
        issues.push({ field: at(field), message: "price must be >= 0" });
      }
    }
    const merch = prices.unit_merchant_price;
    const cons = prices.unit_consumer_price;
    if (merch !== null && cons !== null && merch >= 0 && cons >= 0 && merch < cons) {
      issues.push({
        field: at("unit_consumer_price"),
        message: "consumer price exceeds merchant price",
      });
    }
  });
  return issues;
}
