"""Independent reference implementations used as test oracles.

Nothing here imports the engine, the oracle module, or the KPI module's
internals: the allocator below is a plain-dict transcription of the
published pipeline, the rank test is a brute-force enumeration, and the KPI
recomputation follows the formulas with math.fsum over grouped rows. These
exist so the production code can be checked against a second, structurally
different route to the same answers.

The FIFO allocator at the bottom is not an oracle; it is the naive
arrival-order baseline the rolling-simulation comparison runs against.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Mapping, Sequence

from allocdss.model import (
    CAPACITY_EPS,
    AllocationResult,
    DailyServiceRecord,
    Instance,
    PlanConfig,
    RejectionReason,
)


def _resolve_plan(
    instance: Instance, plan: PlanConfig | None
) -> tuple[dict[str, bool], dict[str, int]]:
    if plan is None:
        return (
            {w.id: w.active for w in instance.warehouses.values()},
            {w.id: w.rank for w in instance.warehouses.values()},
        )
    active = {wid: bool(plan.activations.get(wid, False)) for wid in instance.warehouses}
    ranks = {
        wid: int(plan.ranks.get(wid, instance.warehouses[wid].rank))
        for wid in instance.warehouses
    }
    return active, ranks


def reference_objective(
    instance: Instance, plan: PlanConfig | None, chosen: Sequence[str]
) -> float:
    active, ranks = _resolve_plan(instance, plan)
    lam = 1.0 + sum(o.priority for o in instance.orders)
    active_ranks = [ranks[w] for w, on in active.items() if on]
    pi_max = max(active_ranks) if active_ranks else 1
    by_id = {o.id: o for o in instance.orders}
    total = 0.0
    for oid in sorted(chosen):
        order = by_id[oid]
        total += lam * (pi_max + 1 - ranks[order.warehouse_id]) + order.priority
    return total


def reference_allocate(
    instance: Instance, plan: PlanConfig | None, residuals: Mapping[str, float]
) -> AllocationResult:
    """Step-by-step single-pass allocator with dict trackers.

    Filter (warehouse activation first, then store-category eligibility),
    sort by (rank, -priority, -volume, id), then one sweep accepting an order
    iff the store's cumulative load and, for constrained categories, the
    route-category cumulative load stay within budget plus CAPACITY_EPS.
    """
    active, ranks = _resolve_plan(instance, plan)

    eligible = []
    rejections: dict[str, RejectionReason] = {}
    for order in instance.orders:
        if not active[order.warehouse_id]:
            rejections[order.id] = RejectionReason.WAREHOUSE_INACTIVE
        elif instance.stores[order.store_id].eligibility.get(order.category_id, 0) != 1:
            rejections[order.id] = RejectionReason.INELIGIBLE_NODE
        else:
            eligible.append(order)

    eligible.sort(key=lambda o: (ranks[o.warehouse_id], -o.priority, -o.volume, o.id))

    accepted: list[str] = []
    store_loads = {s: 0.0 for s in instance.stores}
    category_loads: dict[tuple[str, str], float] = {}
    for order in eligible:
        store = instance.stores[order.store_id]
        if store_loads[store.id] + order.volume > residuals[store.id] + CAPACITY_EPS:
            rejections[order.id] = RejectionReason.STORE_CAPACITY
            continue
        category = instance.categories[order.category_id]
        if category.constrained:
            key = (store.route_id, category.id)
            load = category_loads.get(key, 0.0)
            if load + order.volume > category.route_limit + CAPACITY_EPS:
                rejections[order.id] = RejectionReason.CATEGORY_ROUTE_LIMIT
                continue
            category_loads[key] = load + order.volume
        store_loads[store.id] += order.volume
        accepted.append(order.id)

    return AllocationResult(
        accepted=tuple(accepted),
        store_loads=store_loads,
        category_loads=category_loads,
        rejections=rejections,
        objective_value=reference_objective(instance, plan, accepted),
    )


# --- Mann-Whitney oracle ----------------------------------------------------


def _midrank(pooled: Sequence[float], value: float) -> float:
    less = sum(1 for x in pooled if x < value)
    equal = sum(1 for x in pooled if x == value)
    return less + (equal + 1) / 2.0


def mann_whitney_enumeration(
    sample_a: Sequence[float], sample_b: Sequence[float]
) -> tuple[float, float]:
    """U and two-sided p by enumerating every group-A labeling of the pool."""
    pooled = list(sample_a) + list(sample_b)
    ranks = [_midrank(pooled, x) for x in pooled]
    n_a = len(sample_a)
    offset = n_a * (n_a + 1) / 2.0
    u_obs = sum(ranks[: n_a]) - offset

    low = high = total = 0
    for combo in itertools.combinations(range(len(pooled)), n_a):
        u = sum(ranks[i] for i in combo) - offset
        total += 1
        if u <= u_obs:
            low += 1
        if u >= u_obs:
            high += 1
    return u_obs, min(1.0, 2.0 * min(low, high) / total)


# --- KPI second path --------------------------------------------------------


def kpi_second_path(records: Sequence[DailyServiceRecord]) -> dict[str, float]:
    """All pooled metrics computed through fsum and explicit day grouping."""
    rows = sorted(records, key=lambda r: (r.date, r.store_id))
    total_requested = math.fsum(r.requested for r in rows)
    total_shipped = math.fsum(r.shipped for r in rows)
    total_served = math.fsum(r.requested if r.shipped > r.requested else r.shipped for r in rows)

    daily_unserved: dict = defaultdict(list)
    for r in rows:
        daily_unserved[r.date].append(r.requested - r.shipped if r.requested > r.shipped else 0.0)
    per_day = [math.fsum(vals) for _, vals in sorted(daily_unserved.items())]

    n = len(rows)
    return {
        "ship_order_ratio": total_shipped / total_requested,
        "same_day_coverage": total_served / total_requested,
        "avg_daily_unserved": math.fsum(per_day) / len(per_day),
        "share_order_over_limit": sum(r.requested > r.store_limit for r in rows) / n,
        "share_ship_over_limit": sum(r.shipped > r.store_limit for r in rows) / n,
        "share_full_fulfillment": sum(r.shipped >= r.requested for r in rows) / n,
    }


# --- FIFO baseline (comparison subject, not an oracle) ----------------------


def fifo_allocate(
    instance: Instance, plan: PlanConfig | None, residuals: Mapping[str, float]
) -> AllocationResult:
    """Arrival-order allocator with per-store head-of-line blocking.

    Orders ship in pool order. When a store's next order does not fit, that
    store's lane is blocked for the rest of the day (nothing behind the stuck
    order may jump the queue); structurally unshippable orders are skipped
    without blocking. This mirrors a naive first-come-first-served dispatch
    discipline.
    """
    active, _ = _resolve_plan(instance, plan)

    accepted: list[str] = []
    rejections: dict[str, RejectionReason] = {}
    store_loads = {s: 0.0 for s in instance.stores}
    category_loads: dict[tuple[str, str], float] = {}
    blocked: set[str] = set()

    for order in instance.orders:
        if not active[order.warehouse_id]:
            rejections[order.id] = RejectionReason.WAREHOUSE_INACTIVE
            continue
        store = instance.stores[order.store_id]
        if store.eligibility.get(order.category_id, 0) != 1:
            rejections[order.id] = RejectionReason.INELIGIBLE_NODE
            continue
        if store.id in blocked:
            rejections[order.id] = RejectionReason.STORE_CAPACITY
            continue
        fits_store = (
            store_loads[store.id] + order.volume <= residuals[store.id] + CAPACITY_EPS
        )
        category = instance.categories[order.category_id]
        key = (store.route_id, category.id)
        fits_category = (
            not category.constrained
            or category_loads.get(key, 0.0) + order.volume
            <= category.route_limit + CAPACITY_EPS
        )
        if fits_store and fits_category:
            store_loads[store.id] += order.volume
            if category.constrained:
                category_loads[key] = category_loads.get(key, 0.0) + order.volume
            accepted.append(order.id)
        else:
            blocked.add(store.id)
            rejections[order.id] = (
                RejectionReason.STORE_CAPACITY
                if not fits_store
                else RejectionReason.CATEGORY_ROUTE_LIMIT
            )

    return AllocationResult(
        accepted=tuple(accepted),
        store_loads=store_loads,
        category_loads=category_loads,
        rejections=rejections,
        objective_value=reference_objective(instance, plan, accepted),
    )
