// Warehouse board: one draggable card per warehouse, activation toggles,
// and the Run button. Everything here mutates the PlanDraft only; the
// server is not contacted until the planner presses Run.

import type { PlanDraft } from "./plan.js";

export interface BoardCallbacks {
  onChanged: () => void;
  onRun: () => void;
}

export function renderBoard(
  container: HTMLElement,
  draft: PlanDraft,
  callbacks: BoardCallbacks,
): void {
  container.textContent = "";

  const list = document.createElement("ul");
  list.className = "board";

  draft.cards.forEach((card, index) => {
    const item = document.createElement("li");
    item.className = card.activated ? "card" : "card card-off";
    item.draggable = true;
    item.dataset.index = String(index);

    item.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("text/plain", String(index));
    });
    item.addEventListener("dragover", (event) => event.preventDefault());
    item.addEventListener("drop", (event) => {
      event.preventDefault();
      const raw = event.dataTransfer?.getData("text/plain");
      if (raw === undefined || raw === "") return;
      draft.move(Number(raw), index);
      callbacks.onChanged();
    });

    const handle = document.createElement("span");
    handle.className = "handle";
    handle.textContent = "☰";

    const toggle = document.createElement("input");
    toggle.type = "checkbox";
    toggle.checked = card.activated;
    toggle.addEventListener("change", () => {
      draft.toggle(card.id);
      callbacks.onChanged();
    });

    const name = document.createElement("span");
    name.className = "card-name";
    name.textContent = card.id;

    const role = document.createElement("span");
    role.className = "card-role";
    role.textContent = card.roleLabel;

    item.append(handle, toggle, name, role);
    list.appendChild(item);
  });

  const gate = draft.runGate();
  const runButton = document.createElement("button");
  runButton.id = "run-button";
  runButton.textContent = "Run";
  runButton.disabled = gate.disabled;
  runButton.addEventListener("click", callbacks.onRun);

  const note = document.createElement("span");
  note.className = "run-note";
  note.textContent = gate.message ?? "";

  container.append(list, runButton, note);
}

/** Non-blocking banner with a retry hook; board stays usable underneath. */
export function renderErrorBanner(
  container: HTMLElement,
  message: string,
  onRetry: () => void,
): void {
  const old = container.querySelector(".banner");
  if (old) old.remove();

  const banner = document.createElement("div");
  banner.className = "banner";
  const text = document.createElement("span");
  text.textContent = message;
  const retry = document.createElement("button");
  retry.textContent = "retry";
  retry.addEventListener("click", () => {
    banner.remove();
    onRetry();
  });
  banner.append(text, retry);
  container.prepend(banner);
}
