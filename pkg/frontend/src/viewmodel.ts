// Pass-through view model. The console displays server numbers verbatim:
// every value below is String(field) of an API payload field, never a
// locally computed metric, so what the planner reads is what the engine
// wrote. The only counting done here is sizing collections the payload
// already contains (rejection reasons, export rows).

import type { Day2Payload, KpiPayload, ResultDoc, RunResultPayload } from "./api.js";

export interface MetricRow {
  key: string;
  label: string;
  value: string;
}

const KPI_LABELS: [keyof KpiPayload, string][] = [
  ["ship_order_ratio", "ship/order ratio"],
  ["same_day_coverage", "same-day coverage"],
  ["avg_daily_unserved", "avg daily unserved"],
  ["share_order_over_limit", "store-days order > limit"],
  ["share_ship_over_limit", "store-days shipped > limit"],
  ["share_full_fulfillment", "store-days fully served"],
  ["n_days", "days"],
  ["n_store_days", "store-days"],
];

export function kpiRows(kpi: KpiPayload): MetricRow[] {
  return KPI_LABELS.map(([key, label]) => ({ key, label, value: String(kpi[key]) }));
}

export function headlineRows(payload: RunResultPayload): MetricRow[] {
  return [
    { key: "accepted_count", label: "accepted", value: String(payload.accepted_count) },
    { key: "rejected_count", label: "rejected", value: String(payload.rejected_count) },
    {
      key: "objective_value",
      label: "objective",
      value: String(payload.result.objective_value),
    },
  ];
}

export interface LoadBar {
  storeId: string;
  value: string; // displayed load, verbatim payload value
  fraction: number; // bar width only, relative to the largest load
}

export function storeLoadBars(doc: ResultDoc): LoadBar[] {
  const entries = Object.entries(doc.store_loads).sort(([a], [b]) => (a < b ? -1 : 1));
  const peak = entries.reduce((m, [, v]) => Math.max(m, v), 0);
  return entries.map(([storeId, load]) => ({
    storeId,
    value: String(load),
    fraction: peak > 0 ? load / peak : 0,
  }));
}

export interface ReasonCount {
  reason: string;
  count: number;
}

/** Rejection reasons with how many payload entries carry each one. */
export function rejectionBreakdown(doc: ResultDoc): ReasonCount[] {
  const counts = new Map<string, number>();
  for (const reason of Object.values(doc.rejections)) {
    counts.set(reason, (counts.get(reason) ?? 0) + 1);
  }
  return [...counts.entries()]
    .sort(([a], [b]) => (a < b ? -1 : 1))
    .map(([reason, count]) => ({ reason, count }));
}

/**
 * Accepted rows in one dispatch export. The CSV has a header and a TOTAL
 * footer; everything between is one accepted order.
 */
export function exportRowCount(csvText: string): number {
  const lines = csvText.split("\n").filter((line) => line.length > 0);
  return Math.max(0, lines.length - 2);
}

/** Explanatory note for an empty follow-up day, null when there is data. */
export function day2Note(payload: Day2Payload): string | null {
  const doc = payload.result;
  if (doc.accepted.length === 0 && Object.keys(doc.rejections).length === 0) {
    return "nothing left to plan: day 1 accepted every order, so day 2 has an empty pool";
  }
  return null;
}
