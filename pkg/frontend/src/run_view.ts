// Run view: status while polling, then the result panels. Numbers come
// from the view model (payload fields verbatim); this file only places
// them in the document.

import type { Client, Day2Payload, RunResultPayload, RunStatusPayload } from "./api.js";
import {
  day2Note,
  exportRowCount,
  headlineRows,
  kpiRows,
  rejectionBreakdown,
  storeLoadBars,
  type MetricRow,
} from "./viewmodel.js";

function metricTable(rows: MetricRow[], caption: string): HTMLElement {
  const table = document.createElement("table");
  table.className = "metrics";
  const cap = document.createElement("caption");
  cap.textContent = caption;
  table.appendChild(cap);
  for (const row of rows) {
    const tr = document.createElement("tr");
    tr.dataset.key = row.key;
    const th = document.createElement("th");
    th.textContent = row.label;
    const td = document.createElement("td");
    td.textContent = row.value;
    tr.append(th, td);
    table.appendChild(tr);
  }
  return table;
}

export function renderStatus(container: HTMLElement, status: RunStatusPayload): void {
  let line = container.querySelector<HTMLElement>(".status-line");
  if (!line) {
    line = document.createElement("p");
    line.className = "status-line";
    container.prepend(line);
  }
  line.textContent =
    status.state === "failed" && status.error
      ? `run ${status.run_id}: failed (${status.error})`
      : `run ${status.run_id}: ${status.state}`;
}

export async function renderResult(
  container: HTMLElement,
  client: Client,
  payload: RunResultPayload,
  warehouseIds: string[],
): Promise<void> {
  container.textContent = "";

  container.appendChild(metricTable(headlineRows(payload), "run totals"));
  container.appendChild(metricTable(kpiRows(payload.kpi), "service KPIs (day 1)"));

  // per-store loads as bars; the number next to each bar is the payload value
  const loads = document.createElement("div");
  loads.className = "panel loads";
  for (const bar of storeLoadBars(payload.result)) {
    const row = document.createElement("div");
    row.className = "load-row";
    const label = document.createElement("span");
    label.textContent = bar.storeId;
    const track = document.createElement("span");
    track.className = "bar";
    track.style.width = `${Math.round(bar.fraction * 100)}%`;
    const value = document.createElement("span");
    value.className = "load-value";
    value.textContent = bar.value;
    row.append(label, track, value);
    loads.appendChild(row);
  }
  container.appendChild(loads);

  const reasons = document.createElement("ul");
  reasons.className = "panel reasons";
  for (const item of rejectionBreakdown(payload.result)) {
    const li = document.createElement("li");
    li.textContent = `${item.reason}: ${item.count}`;
    reasons.appendChild(li);
  }
  container.appendChild(reasons);

  // export links, one per active warehouse, with the row count fetched
  // from the export itself
  const exports = document.createElement("ul");
  exports.className = "panel exports";
  for (const wid of warehouseIds) {
    const li = document.createElement("li");
    const link = document.createElement("a");
    link.href = client.exportUrl(payload.run_id, wid);
    link.download = `dispatch_${wid}.csv`;
    link.textContent = `dispatch_${wid}.csv`;
    li.appendChild(link);
    try {
      const text = await client.getExport(payload.run_id, wid);
      const rows = document.createElement("span");
      rows.textContent = ` (${exportRowCount(text)} orders)`;
      li.appendChild(rows);
    } catch {
      // deactivated mid-session or gone; the link stays, count is omitted
    }
    exports.appendChild(li);
  }
  container.appendChild(exports);

  const day2Button = document.createElement("button");
  day2Button.id = "day2-button";
  day2Button.textContent = "Simulate Day 2";
  const day2Panel = document.createElement("div");
  day2Panel.className = "panel day2";
  day2Button.addEventListener("click", async () => {
    day2Button.disabled = true;
    try {
      const day2 = await client.getDay2(payload.run_id);
      renderDay2(day2Panel, day2);
    } catch (err) {
      day2Panel.textContent = `day-2 simulation failed: ${String(err)}`;
      day2Button.disabled = false;
    }
  });
  container.append(day2Button, day2Panel);
}

export function renderDay2(panel: HTMLElement, payload: Day2Payload): void {
  panel.textContent = "";
  const note = day2Note(payload);
  if (note !== null) {
    const p = document.createElement("p");
    p.className = "day2-empty";
    p.textContent = note;
    panel.appendChild(p);
    return;
  }
  const rows: MetricRow[] = [
    {
      key: "day2_accepted",
      label: "accepted",
      value: String(payload.result.accepted.length),
    },
    {
      key: "day2_rejected",
      label: "rejected",
      value: String(Object.keys(payload.result.rejections).length),
    },
    {
      key: "day2_objective",
      label: "objective",
      value: String(payload.result.objective_value),
    },
  ];
  panel.appendChild(metricTable(rows, "day 2 (simulated)"));
}
