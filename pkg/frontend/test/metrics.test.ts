import { describe, expect, it } from "vitest";

import type { Day2Payload, RunResultPayload } from "../src/api.js";
import { Client } from "../src/api.js";
import {
  day2Note,
  exportRowCount,
  headlineRows,
  kpiRows,
  rejectionBreakdown,
  storeLoadBars,
} from "../src/viewmodel.js";

// Consistent mocked payload; KPI floats copied from a live run so the
// formatting path sees real awkward decimals, counts kept small enough to
// audit by eye (rejections has exactly rejected_count entries).
const RESULT_PAYLOAD: RunResultPayload = {
  run_id: "f00d",
  instance_hash: "a".repeat(64),
  result: {
    schema: "allocdss.result/1",
    accepted: ["o00000003", "o00000001", "o00000007", "o00000002", "o00000009"],
    store_loads: {
      s00001: 61.24162803930977,
      s00002: 28.4562906132849,
      s00003: 53.25252522139975,
    },
    category_loads: [{ route_id: "r001", category_id: "c002", volume: 17.25 }],
    rejections: {
      o00000004: "STORE_CAPACITY",
      o00000005: "INELIGIBLE_NODE",
      o00000006: "STORE_CAPACITY",
      o00000008: "WAREHOUSE_INACTIVE",
    },
    objective_value: 108397.0,
  },
  kpi: {
    ship_order_ratio: 0.7367554141202667,
    same_day_coverage: 0.7367554141202667,
    avg_daily_unserved: 131.60588275581557,
    share_order_over_limit: 1.0,
    share_ship_over_limit: 0.0,
    share_full_fulfillment: 0.0,
    n_days: 1,
    n_store_days: 9,
  },
  accepted_count: 5,
  rejected_count: 4,
};

function jsonResponse(payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

describe("displayed metrics are payload fields verbatim", () => {
  it("every KPI row equals String() of its payload field", async () => {
    // through the client, so the values compared are post-wire
    const client = new Client("", async () => jsonResponse(RESULT_PAYLOAD));
    const payload = await client.getResult("f00d");

    const rows = kpiRows(payload.kpi);
    expect(rows).toHaveLength(8);
    for (const row of rows) {
      const field = payload.kpi[row.key as keyof typeof payload.kpi];
      expect(row.value).toBe(String(field));
    }
    // spot-check that no rounding crept in
    const ratio = rows.find((r) => r.key === "ship_order_ratio")!;
    expect(ratio.value).toBe("0.7367554141202667");
  });

  it("headline rows pass through counts and objective", () => {
    const rows = headlineRows(RESULT_PAYLOAD);
    expect(rows.map((r) => [r.key, r.value])).toEqual([
      ["accepted_count", "5"],
      ["rejected_count", "4"],
      ["objective_value", "108397"],
    ]);
  });

  it("every number on screen is traceable to a payload field", () => {
    const payloadNumbers = new Set<string>();
    const walk = (node: unknown): void => {
      if (typeof node === "number") payloadNumbers.add(String(node));
      else if (Array.isArray(node)) node.forEach(walk);
      else if (node && typeof node === "object") Object.values(node).forEach(walk);
    };
    walk(RESULT_PAYLOAD);
    // collection sizes count as payload-traceable: they are the lengths of
    // lists the payload itself carries
    payloadNumbers.add(String(RESULT_PAYLOAD.result.accepted.length));
    for (const { count } of rejectionBreakdown(RESULT_PAYLOAD.result)) {
      payloadNumbers.add(String(count));
    }

    const displayed = [
      ...kpiRows(RESULT_PAYLOAD.kpi).map((r) => r.value),
      ...headlineRows(RESULT_PAYLOAD).map((r) => r.value),
      ...storeLoadBars(RESULT_PAYLOAD.result).map((b) => b.value),
    ];
    for (const value of displayed) {
      expect(payloadNumbers.has(value), `displayed ${value} not in payload`).toBe(true);
    }
  });

  it("store load bars show the exact payload loads, widest first equals peak", () => {
    const bars = storeLoadBars(RESULT_PAYLOAD.result);
    expect(bars.map((b) => b.storeId)).toEqual(["s00001", "s00002", "s00003"]);
    expect(bars.map((b) => b.value)).toEqual([
      "61.24162803930977",
      "28.4562906132849",
      "53.25252522139975",
    ]);
    expect(bars[0]!.fraction).toBe(1);
    expect(bars.every((b) => b.fraction > 0 && b.fraction <= 1)).toBe(true);
  });

  it("rejection breakdown partitions the rejected count", () => {
    const breakdown = rejectionBreakdown(RESULT_PAYLOAD.result);
    expect(breakdown).toEqual([
      { reason: "INELIGIBLE_NODE", count: 1 },
      { reason: "STORE_CAPACITY", count: 2 },
      { reason: "WAREHOUSE_INACTIVE", count: 1 },
    ]);
    const total = breakdown.reduce((acc, item) => acc + item.count, 0);
    expect(total).toBe(RESULT_PAYLOAD.rejected_count);
  });

  it("export row count reads the rows between header and TOTAL footer", () => {
    const csv =
      "sequence,order_id,store_id,route_id,category_id,volume\n" +
      "1,o00000024,s00002,r002,c006,4.932054268239773\n" +
      "2,o00000110,s00004,r001,c003,3.7104096912675653\n" +
      "TOTAL,,,,,8.642463959507339\n";
    expect(exportRowCount(csv)).toBe(2);
    expect(exportRowCount("sequence,order_id,store_id,route_id,category_id,volume\nTOTAL,,,,,0.0\n")).toBe(0);
  });
});

describe("day 2 panel", () => {
  const empty: Day2Payload = {
    run_id: "f00d",
    result: {
      schema: "allocdss.result/1",
      accepted: [],
      store_loads: {},
      category_loads: [],
      rejections: {},
      objective_value: 0.0,
    },
  };

  it("explains an empty follow-up day instead of showing zeros", () => {
    expect(day2Note(empty)).toMatch(/day 1 accepted every order/);
  });

  it("stays quiet when day 2 has content", () => {
    const busy: Day2Payload = {
      run_id: "f00d",
      result: { ...empty.result, rejections: { o00000004: "STORE_CAPACITY" } },
    };
    expect(day2Note(busy)).toBeNull();
  });
});
