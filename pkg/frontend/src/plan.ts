// Draft plan state behind the warehouse board. Ranks are never stored:
// they are read off the card order every time the payload is built, so a
// duplicate or gapped rank cannot exist by construction.

import type { PlanPayload, WarehouseDescriptor } from "./api.js";

export interface Card {
  id: string;
  activated: boolean;
  roleLabel: string;
}

export interface RunGate {
  disabled: boolean;
  message: string | null;
}

export class PlanDraft {
  cards: Card[];

  constructor(cards: Card[]) {
    this.cards = cards;
  }

  static fromWarehouses(warehouses: WarehouseDescriptor[]): PlanDraft {
    // the service returns the fleet already sorted by rank
    return new PlanDraft(
      warehouses.map((w) => ({ id: w.id, activated: w.active, roleLabel: w.role_label })),
    );
  }

  /** Move the card at `from` so it sits at index `to` (drag semantics). */
  move(from: number, to: number): void {
    const n = this.cards.length;
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw new RangeError(`move(${from}, ${to}) outside 0..${n - 1}`);
    }
    if (from === to) return;
    const [card] = this.cards.splice(from, 1);
    this.cards.splice(to, 0, card!);
  }

  toggle(id: string): void {
    const card = this.cards.find((c) => c.id === id);
    if (card === undefined) throw new RangeError(`no card for warehouse ${id}`);
    card.activated = !card.activated;
  }

  /** Activated warehouse ids in visual top-to-bottom order. */
  activatedIds(): string[] {
    return this.cards.filter((c) => c.activated).map((c) => c.id);
  }

  /** Rank per activated warehouse: its 1-based position among activated cards. */
  derivedRanks(): Record<string, number> {
    const ranks: Record<string, number> = {};
    this.activatedIds().forEach((id, i) => {
      ranks[id] = i + 1;
    });
    return ranks;
  }

  canRun(): boolean {
    return this.cards.some((c) => c.activated);
  }

  runGate(): RunGate {
    if (this.canRun()) return { disabled: false, message: null };
    return { disabled: true, message: "activate at least one warehouse to run" };
  }

  toPlanPayload(): PlanPayload {
    const activations: Record<string, boolean> = {};
    for (const card of this.cards) activations[card.id] = card.activated;
    return {
      schema: "allocdss.plan/1",
      activations,
      ranks: this.derivedRanks(),
    };
  }
}
