import type { Client, RunStatusPayload } from "./api.js";

export interface PollOptions {
  intervalMs?: number;
  backoff?: number;
  maxIntervalMs?: number;
  onTick?: (status: RunStatusPayload) => void;
  sleep?: (ms: number) => Promise<void>;
}

const wait = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/** Poll a run until it settles. Starts at 500 ms and backs off gently. */
export async function pollRun(
  client: Client,
  runId: string,
  options: PollOptions = {},
): Promise<RunStatusPayload> {
  const interval = options.intervalMs ?? 500;
  const backoff = options.backoff ?? 1.5;
  const ceiling = options.maxIntervalMs ?? 5000;
  const sleep = options.sleep ?? wait;

  let delay = interval;
  for (;;) {
    const status = await client.getRun(runId);
    options.onTick?.(status);
    if (status.state === "done" || status.state === "failed") return status;
    await sleep(delay);
    delay = Math.min(delay * backoff, ceiling);
  }
}
