// REST client for the run service. Field names below mirror the wire
// payloads one to one; nothing is renamed or reshaped on the way in.

export interface WarehouseDescriptor {
  id: string;
  active: boolean;
  rank: number;
  role_label: string;
}

export interface WarehousesPayload {
  instance_hash: string;
  warehouses: WarehouseDescriptor[];
}

export interface PlanPayload {
  schema: "allocdss.plan/1";
  activations: Record<string, boolean>;
  ranks: Record<string, number>;
}

export type RunState = "pending" | "running" | "done" | "failed";

export interface RunStatusPayload {
  run_id: string;
  state: RunState;
  timings: Record<string, number> | null;
  error: string | null;
}

export interface CategoryLoad {
  route_id: string;
  category_id: string;
  volume: number;
}

export interface ResultDoc {
  schema: string;
  accepted: string[];
  store_loads: Record<string, number>;
  category_loads: CategoryLoad[];
  rejections: Record<string, string>;
  objective_value: number;
}

export interface KpiPayload {
  ship_order_ratio: number;
  same_day_coverage: number;
  avg_daily_unserved: number;
  share_order_over_limit: number;
  share_ship_over_limit: number;
  share_full_fulfillment: number;
  n_days: number;
  n_store_days: number;
}

export interface RunResultPayload {
  run_id: string;
  instance_hash: string;
  result: ResultDoc;
  kpi: KpiPayload;
  accepted_count: number;
  rejected_count: number;
}

export interface Day2Payload {
  run_id: string;
  result: ResultDoc;
}

export interface SubmitAck {
  run_id: string;
  state: RunState;
}

interface ValidationEntry {
  field: string;
  message: string;
}

export class ApiError extends Error {
  status: number;
  // set when the server returned a structured 422 body
  validationErrors: ValidationEntry[];

  constructor(status: number, message: string, validationErrors: ValidationEntry[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.validationErrors = validationErrors;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseFor(response: Response): Promise<void> {
  if (response.ok) return;
  let message = `${response.status} ${response.statusText}`;
  let entries: ValidationEntry[] = [];
  try {
    const body = await response.json();
    const detail = body?.detail;
    if (typeof detail === "string") {
      message = detail;
    } else if (detail && typeof detail === "object") {
      message = detail.message ?? message;
      if (Array.isArray(detail.errors)) entries = detail.errors;
    }
  } catch {
    // non-JSON error body, keep the status line
  }
  throw new ApiError(response.status, message, entries);
}

export class Client {
  private base: string;
  private fetchFn: FetchLike;

  constructor(base = "", fetchFn?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    // bind so a bare window.fetch does not lose its receiver
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    await raiseFor(response);
    return (await response.json()) as T;
  }

  async getWarehouses(): Promise<WarehousesPayload> {
    return this.getJson<WarehousesPayload>("/warehouses");
  }

  async submitRun(
    plan: PlanPayload,
    options: { instanceHash?: string; simulateSecondDay?: boolean } = {},
  ): Promise<SubmitAck> {
    const body: Record<string, unknown> = { plan };
    if (options.instanceHash !== undefined) body.instance_hash = options.instanceHash;
    if (options.simulateSecondDay !== undefined)
      body.simulate_second_day = options.simulateSecondDay;
    const response = await this.fetchFn(this.base + "/runs", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseFor(response);
    return (await response.json()) as SubmitAck;
  }

  async getRun(runId: string): Promise<RunStatusPayload> {
    return this.getJson<RunStatusPayload>(`/runs/${runId}`);
  }

  async getResult(runId: string): Promise<RunResultPayload> {
    return this.getJson<RunResultPayload>(`/runs/${runId}/result`);
  }

  async getDay2(runId: string): Promise<Day2Payload> {
    return this.getJson<Day2Payload>(`/runs/${runId}/day2`);
  }

  exportUrl(runId: string, warehouseId: string): string {
    return `${this.base}/runs/${runId}/exports/${warehouseId}`;
  }

  async getExport(runId: string, warehouseId: string): Promise<string> {
    const response = await this.fetchFn(this.exportUrl(runId, warehouseId));
    await raiseFor(response);
    return response.text();
  }
}
