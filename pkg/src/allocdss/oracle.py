"""Exact small-instance solver used for gap measurement and ground truth.

Two search routes over the same constraint set: exhaustive subset enumeration
(small pools only) and depth-first branch-and-bound with a per-store
fractional-knapsack upper bound. Both maximize the rank-dominant objective
subject to store residual capacities, route-category limits, node
eligibility, and warehouse activation, and both break ties between distinct
optimal sets by the lexicographically smallest sorted id sequence.

No external MILP solver: these instances are ground truth for tests and gap
benchmarks, not production-scale solves.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .engine import allocate, filter_eligible
from .model import CAPACITY_EPS, Instance, PlanConfig, ResidualCapacityMap
from .objective import lambda_for, objective_value, order_coefficients

__all__ = [
    "OracleSolution",
    "GapReport",
    "lambda_for",
    "objective_value",
    "solve_enumeration",
    "solve_exact",
    "gap_report",
]

_ENUMERATION_CAP = 22  # 2^22 subsets is the practical ceiling for brute force


@dataclass(frozen=True, slots=True)
class OracleSolution:
    chosen: frozenset[str]
    objective: float
    optimal: bool
    node_count: int


@dataclass(frozen=True, slots=True)
class GapReport:
    heuristic_objective: float
    oracle_objective: float
    relative_gap: float
    usable: bool  # false when the oracle run hit its budget before proving optimality


class _Pool:
    """Eligible orders in array form for the two searches."""

    __slots__ = ("ids", "coef", "vol", "store", "slot", "store_cap", "slot_cap", "n")

    def __init__(
        self, instance: Instance, plan: PlanConfig | None, residuals: ResidualCapacityMap
    ) -> None:
        eligible, _ = filter_eligible(instance, plan)
        coefs = order_coefficients(instance, plan)

        store_ids = sorted({o.store_id for o in eligible})
        store_index = {s: i for i, s in enumerate(store_ids)}
        slot_keys = sorted(
            {
                (instance.stores[o.store_id].route_id, o.category_id)
                for o in eligible
                if instance.categories[o.category_id].constrained
            }
        )
        slot_index = {k: i for i, k in enumerate(slot_keys)}

        eligible = sorted(eligible, key=lambda o: o.id)
        self.n = len(eligible)
        self.ids = [o.id for o in eligible]
        self.coef = [coefs[o.id] for o in eligible]
        self.vol = [o.volume for o in eligible]
        self.store = [store_index[o.store_id] for o in eligible]
        self.slot = [
            slot_index[(instance.stores[o.store_id].route_id, o.category_id)]
            if instance.categories[o.category_id].constrained
            else -1
            for o in eligible
        ]
        self.store_cap = [float(residuals[s]) for s in store_ids]
        self.slot_cap = [
            float(instance.categories[c].route_limit) for (_r, c) in slot_keys
        ]


def solve_enumeration(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    max_orders: int = _ENUMERATION_CAP,
) -> OracleSolution:
    """Brute-force optimum by checking every subset of the eligible pool."""
    pool = _Pool(instance, plan, residuals)
    n = pool.n
    if n > max_orders:
        raise ValueError(f"enumeration limited to {max_orders} eligible orders, got {n}")

    eps = CAPACITY_EPS
    best_value = 0.0
    best_ids: tuple[str, ...] = ()
    for mask in range(1 << n):
        store_load = [0.0] * len(pool.store_cap)
        slot_load = [0.0] * len(pool.slot_cap)
        value = 0.0
        feasible = True
        for i in range(n):
            if not mask >> i & 1:
                continue
            m = pool.store[i]
            store_load[m] += pool.vol[i]
            if store_load[m] > pool.store_cap[m] + eps:
                feasible = False
                break
            slot = pool.slot[i]
            if slot >= 0:
                slot_load[slot] += pool.vol[i]
                if slot_load[slot] > pool.slot_cap[slot] + eps:
                    feasible = False
                    break
            value += pool.coef[i]
        if not feasible:
            continue
        ids = tuple(pool.ids[i] for i in range(n) if mask >> i & 1)
        if value > best_value or (value == best_value and ids < best_ids):
            best_value = value
            best_ids = ids

    chosen = frozenset(best_ids)
    return OracleSolution(
        chosen=chosen,
        objective=objective_value(instance, plan, chosen),
        optimal=True,
        node_count=1 << n,
    )


def solve_exact(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    max_nodes: int = 2_000_000,
    time_limit: float | None = None,
) -> OracleSolution:
    """Depth-first branch-and-bound; optimal=False when the budget ran out.

    Items are explored densest-first; the bound at each node is the sum of
    per-store fractional knapsacks over undecided items (route-category caps
    and integrality relaxed away, so the bound never underestimates). A node
    is pruned only when its bound is strictly below the incumbent, which keeps
    every co-optimal leaf reachable for the deterministic tie-break.
    """
    pool = _Pool(instance, plan, residuals)
    n = pool.n
    order = sorted(range(n), key=lambda i: (-pool.coef[i] / pool.vol[i], pool.ids[i]))
    coef = [pool.coef[i] for i in order]
    vol = [pool.vol[i] for i in order]
    store = [pool.store[i] for i in order]
    slot = [pool.slot[i] for i in order]
    ids = [pool.ids[i] for i in order]

    eps = CAPACITY_EPS
    store_rem = list(pool.store_cap)
    slot_rem = list(pool.slot_cap)
    chosen_stack: list[int] = []

    best_value = -1.0
    best_ids: tuple[str, ...] = ()
    node_count = 0
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    exhausted = True

    def bound_from(k: int, value: float) -> float:
        rem = list(store_rem)
        total = value
        for i in range(k, n):
            r = rem[store[i]]
            if r <= 0.0:
                continue
            take = vol[i] if vol[i] <= r else r
            total += coef[i] * (take / vol[i])
            rem[store[i]] = r - take
        return total

    def dfs(k: int, value: float) -> None:
        nonlocal best_value, best_ids, node_count, exhausted
        if not exhausted:
            return
        node_count += 1
        if node_count > max_nodes or (deadline is not None and time.monotonic() > deadline):
            exhausted = False
            return
        if k == n:
            ids_here = tuple(sorted(ids[i] for i in chosen_stack))
            if value > best_value or (value == best_value and ids_here < best_ids):
                best_value = value
                best_ids = ids_here
            return
        if bound_from(k, value) < best_value - eps:
            return

        m, s, v = store[k], slot[k], vol[k]
        fits = store_rem[m] + eps >= v and (s < 0 or slot_rem[s] + eps >= v)
        if fits:
            store_rem[m] -= v
            if s >= 0:
                slot_rem[s] -= v
            chosen_stack.append(k)
            dfs(k + 1, value + coef[k])
            chosen_stack.pop()
            store_rem[m] += v
            if s >= 0:
                slot_rem[s] += v
        dfs(k + 1, value)

    dfs(0, 0.0)

    chosen = frozenset(best_ids)
    return OracleSolution(
        chosen=chosen,
        objective=objective_value(instance, plan, chosen),
        optimal=exhausted,
        node_count=node_count,
    )


def gap_report(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    max_nodes: int = 2_000_000,
    time_limit: float | None = None,
) -> GapReport:
    """Heuristic objective vs exact optimum on one instance.

    relative_gap is (oracle - heuristic) / max(oracle, 1e-12); a report from a
    non-optimal oracle run is flagged unusable rather than raising.
    """
    heuristic = allocate(instance, plan, residuals).objective_value
    exact = solve_exact(instance, plan, residuals, max_nodes=max_nodes, time_limit=time_limit)
    gap = (exact.objective - heuristic) / max(exact.objective, 1e-12)
    return GapReport(
        heuristic_objective=heuristic,
        oracle_objective=exact.objective,
        relative_gap=gap,
        usable=exact.optimal,
    )
