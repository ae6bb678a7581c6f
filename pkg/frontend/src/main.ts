import { ApiError, Client } from "./api.js";
import { renderBoard, renderErrorBanner } from "./board.js";
import { PlanDraft } from "./plan.js";
import { pollRun } from "./poll.js";
import { renderResult, renderStatus } from "./run_view.js";

const client = new Client("");
let draft: PlanDraft | null = null;
let runInFlight = false;

function boardHost(): HTMLElement {
  return document.getElementById("board")!;
}

function runHost(): HTMLElement {
  return document.getElementById("run")!;
}

async function loadBoard(): Promise<void> {
  try {
    const payload = await client.getWarehouses();
    draft = PlanDraft.fromWarehouses(payload.warehouses);
    redraw();
  } catch (err) {
    renderErrorBanner(document.body, `could not load warehouses: ${String(err)}`, () => {
      void loadBoard();
    });
  }
}

function redraw(): void {
  if (!draft) return;
  renderBoard(boardHost(), draft, { onChanged: redraw, onRun: () => void launch() });
}

async function launch(): Promise<void> {
  if (!draft || !draft.canRun()) return;
  if (runInFlight && !window.confirm("a run is still in flight; start another?")) {
    return;
  }
  runInFlight = true;
  const host = runHost();
  host.textContent = "";
  try {
    const ack = await client.submitRun(draft.toPlanPayload());
    const status = await pollRun(client, ack.run_id, {
      onTick: (s) => renderStatus(host, s),
    });
    if (status.state === "failed") return; // renderStatus already shows the engine message
    const payload = await client.getResult(ack.run_id);
    await renderResult(host, client, payload, draft.activatedIds());
  } catch (err) {
    if (err instanceof ApiError && err.validationErrors.length > 0) {
      // surface each violation next to the board, naming the field
      const lines = err.validationErrors
        .map((e) => `${e.field}: ${e.message}`)
        .join("; ");
      renderErrorBanner(document.body, `plan rejected: ${lines}`, redraw);
    } else {
      renderErrorBanner(document.body, `run failed: ${String(err)}`, () => void launch());
    }
  } finally {
    runInFlight = false;
  }
}

void loadBoard();
