import { describe, expect, it } from "vitest";

import type { WarehouseDescriptor } from "../src/api.js";
import { PlanDraft } from "../src/plan.js";

// deterministic PRNG so failures reproduce
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function fleet(n: number): WarehouseDescriptor[] {
  return Array.from({ length: n }, (_, i) => ({
    id: `w${String(i + 1).padStart(2, "0")}`,
    active: true,
    rank: i + 1,
    role_label: i === 0 ? "Warehouse-Primary" : `Warehouse-Rank${i + 1}`,
  }));
}

/** Reference rank computation, written against the card list directly. */
function ranksFromVisualOrder(draft: PlanDraft): Record<string, number> {
  const expected: Record<string, number> = {};
  let position = 0;
  for (const card of draft.cards) {
    if (!card.activated) continue;
    position += 1;
    expected[card.id] = position;
  }
  return expected;
}

/** Realize a target permutation via selection-style drags (front to back). */
function dragIntoOrder(draft: PlanDraft, targetIds: string[]): void {
  for (let position = 0; position < targetIds.length; position++) {
    const from = draft.cards.findIndex((c) => c.id === targetIds[position]);
    draft.move(from, position);
  }
}

describe("drag order to rank payload", () => {
  it("matches visual top-to-bottom order on 20 random permutations", () => {
    const rand = mulberry32(0xa11c);
    for (let trial = 0; trial < 20; trial++) {
      const n = 3 + Math.floor(rand() * 5); // 3..7 warehouses
      const draft = PlanDraft.fromWarehouses(fleet(n));

      // random drags, then random toggles
      const dragCount = 2 * n;
      for (let d = 0; d < dragCount; d++) {
        draft.move(Math.floor(rand() * n), Math.floor(rand() * n));
      }
      for (const card of draft.cards) {
        if (rand() < 0.3) draft.toggle(card.id);
      }
      if (!draft.canRun()) draft.toggle(draft.cards[0]!.id); // payload needs one active

      const payload = draft.toPlanPayload();
      expect(payload.ranks).toEqual(ranksFromVisualOrder(draft));

      // activations cover every card with its current toggle state
      expect(Object.keys(payload.activations).sort()).toEqual(
        draft.cards.map((c) => c.id).sort(),
      );
      for (const card of draft.cards) {
        expect(payload.activations[card.id]).toBe(card.activated);
      }

      // ranks are exactly 1..k over the activated cards, no gaps, no dupes
      const values = Object.values(payload.ranks).sort((a, b) => a - b);
      expect(values).toEqual(values.map((_, i) => i + 1));
      expect(Object.keys(payload.ranks).sort()).toEqual(draft.activatedIds().sort());
    }
  });

  it("is a function of the final order, not the drag path", () => {
    const rand = mulberry32(7);
    for (let trial = 0; trial < 20; trial++) {
      const n = 4 + Math.floor(rand() * 3);
      const target = fleet(n)
        .map((w) => w.id)
        .sort(() => rand() - 0.5);

      const a = PlanDraft.fromWarehouses(fleet(n));
      dragIntoOrder(a, target);

      // second path: random shuffling first, then the same selection drags
      const b = PlanDraft.fromWarehouses(fleet(n));
      for (let d = 0; d < 6; d++) b.move(Math.floor(rand() * n), Math.floor(rand() * n));
      dragIntoOrder(b, target);

      expect(a.cards.map((c) => c.id)).toEqual(target);
      expect(b.toPlanPayload()).toEqual(a.toPlanPayload());
    }
  });

  it("shifts ranks when a card is dragged to the top", () => {
    const draft = PlanDraft.fromWarehouses(fleet(3));
    draft.move(2, 0);
    expect(draft.toPlanPayload().ranks).toEqual({ w03: 1, w01: 2, w02: 3 });
  });

  it("skips deactivated cards when deriving ranks", () => {
    const draft = PlanDraft.fromWarehouses(fleet(4));
    draft.toggle("w02");
    expect(draft.toPlanPayload().ranks).toEqual({ w01: 1, w03: 2, w04: 3 });
    expect(draft.toPlanPayload().activations).toEqual({
      w01: true,
      w02: false,
      w03: true,
      w04: true,
    });
  });

  it("rejects out-of-range drags", () => {
    const draft = PlanDraft.fromWarehouses(fleet(3));
    expect(() => draft.move(0, 3)).toThrow(RangeError);
    expect(() => draft.move(-1, 0)).toThrow(RangeError);
  });
});

describe("run gate", () => {
  it("is disabled precisely when zero cards are activated", () => {
    // exhaustive over all activation subsets of a 3-warehouse fleet
    for (let mask = 0; mask < 8; mask++) {
      const draft = PlanDraft.fromWarehouses(fleet(3));
      for (let i = 0; i < 3; i++) {
        if (!(mask & (1 << i))) draft.toggle(draft.cards[i]!.id);
      }
      const anyActive = mask !== 0;
      expect(draft.canRun()).toBe(anyActive);
      expect(draft.runGate().disabled).toBe(!anyActive);
      expect(draft.runGate().message === null).toBe(anyActive);
    }
  });

  it("re-enables as soon as one toggle comes back", () => {
    const draft = PlanDraft.fromWarehouses(fleet(2));
    draft.toggle("w01");
    draft.toggle("w02");
    expect(draft.runGate().disabled).toBe(true);
    draft.toggle("w02");
    expect(draft.runGate().disabled).toBe(false);
    expect(draft.derivedRanks()).toEqual({ w02: 1 });
  });
});
