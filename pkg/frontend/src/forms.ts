// Form submission: validate locally, then post the raw field values — the
// service re-validates everything, the client just answers faster.

import { Api, ScheduleRow } from "./api";
import { Issue, ItemForm, ScheduleForm, validateItems, validateSchedule } from "./validate";

export class FormRejected extends Error {
  constructor(public issues: Issue[]) {
    super(issues.map((i) => `${i.field}: ${i.message}`).join("; "));
  }
}

export function scheduleBody(form: ScheduleForm): Record<string, unknown> {
  return {
    periodicity: form.periodicity,
    valid_from: form.valid_from,
    valid_to: form.valid_to,
    max_persons: form.max_persons.trim() === "" ? null : form.max_persons,
  };
}

export async function submitSchedule(
  api: Api,
  quotaId: string,
  form: ScheduleForm,
): Promise<ScheduleRow> {
  const issues = validateSchedule(form);
  if (issues.length) throw new FormRejected(issues);
  const { id } = await api.defineSchedule(quotaId, scheduleBody(form));
  return api.getSchedule(id);
}

export async function submitItems(
  api: Api,
  scheduleId: string,
  items: ItemForm[],
): Promise<ScheduleRow> {
  const issues = validateItems(items);
  if (issues.length) throw new FormRejected(issues);
  await api.setItems(scheduleId, items);
  return api.getSchedule(scheduleId);
}
