"""Single-pass cumulative allocation engine.

Pipeline: prune orders that fail node eligibility or warehouse activation,
sort the survivors lexicographically (warehouse rank ascending, priority
descending, volume descending, order id ascending), then sweep once over the
sorted sequence accepting every order whose store and route-category
cumulative loads stay within budget. Rejected orders are never revisited
within a run; there is no backtracking.

The sweep itself runs in a kernel (compiled extension or pure-Python
fallback, see ``allocdss._kernels``); everything else is vectorized numpy.
All functions here are pure: identical inputs give identical results,
including the acceptance sequence and rejection reasons.
"""

from __future__ import annotations

import dataclasses
import time
from typing import Mapping

import numpy as np

from ._kernels import get_kernel
from ._kernels.pure import ACCEPTED, REJ_CATEGORY, REJ_STORE
from .model import (
    CAPACITY_EPS,
    AllocationResult,
    Instance,
    Order,
    PlanConfig,
    RejectionReason,
    ResidualCapacityMap,
    effective_plan,
    residual_capacities,
)
from .objective import objective_value


def filter_eligible(
    instance: Instance, plan: PlanConfig | None = None
) -> tuple[list[Order], dict[str, RejectionReason]]:
    """Split the order pool into eligible orders and pruned rejections.

    Warehouse activation is checked first, node eligibility second; an order
    failing both carries WAREHOUSE_INACTIVE.
    """
    active, _ = effective_plan(instance, plan)
    eligible: list[Order] = []
    rejections: dict[str, RejectionReason] = {}
    for order in instance.orders:
        if not active[order.warehouse_id]:
            rejections[order.id] = RejectionReason.WAREHOUSE_INACTIVE
        elif instance.stores[order.store_id].eligibility.get(order.category_id, 0) != 1:
            rejections[order.id] = RejectionReason.INELIGIBLE_NODE
        else:
            eligible.append(order)
    return eligible, rejections


def sort_eligible(eligible: list[Order], plan: PlanConfig) -> list[Order]:
    """Deterministic allocation sequence over eligible orders.

    Sort key: warehouse rank ascending, priority descending, volume
    descending, order id ascending (final tie-break making the order total).
    Every eligible order's warehouse must carry a rank in the plan.
    """
    ranks = plan.ranks
    return sorted(
        eligible, key=lambda o: (ranks[o.warehouse_id], -o.priority, -o.volume, o.id)
    )


class _Prepared:
    """Array form of one (instance, plan, residuals) triple plus filter output."""

    __slots__ = (
        "instance",
        "plan",
        "order_ids",
        "store_pos",
        "volumes",
        "eligible_idx",
        "filter_codes",
        "slot_of_order",
        "store_budget",
        "slot_budget",
        "store_ids",
        "slot_pairs",
        "sort_keys",
    )

    def __init__(
        self,
        instance: Instance,
        plan: PlanConfig | None,
        residuals: ResidualCapacityMap,
    ) -> None:
        self.instance = instance
        self.plan = plan
        orders = instance.orders
        n = len(orders)

        store_ids = sorted(instance.stores)
        cat_ids = sorted(instance.categories)
        wh_ids = sorted(instance.warehouses)
        route_ids = sorted(instance.routes)
        store_index = {s: i for i, s in enumerate(store_ids)}
        cat_index = {c: i for i, c in enumerate(cat_ids)}
        wh_index = {w: i for i, w in enumerate(wh_ids)}
        route_index = {r: i for i, r in enumerate(route_ids)}
        self.store_ids = store_ids

        missing = [s for s in store_ids if s not in residuals]
        if missing:
            raise ValueError(f"residual capacities missing for stores: {missing}")
        self.store_budget = np.array(
            [float(residuals[s]) for s in store_ids], dtype=np.float64
        )

        active, ranks = effective_plan(instance, plan)
        active_arr = np.array([active[w] for w in wh_ids], dtype=bool)
        rank_arr = np.array([ranks[w] for w in wh_ids], dtype=np.int64)

        elig = np.zeros((len(store_ids), max(len(cat_ids), 1)), dtype=bool)
        for s_id in store_ids:
            store = instance.stores[s_id]
            row = elig[store_index[s_id]]
            for c_id, flag in store.eligibility.items():
                if c_id in cat_index:
                    row[cat_index[c_id]] = flag == 1

        # Flattened (route, constrained-category) slots for the kernel.
        constrained = [c for c in cat_ids if instance.categories[c].constrained]
        con_slot = {c: i for i, c in enumerate(constrained)}
        limits = np.array(
            [float(instance.categories[c].route_limit) for c in constrained],
            dtype=np.float64,
        )
        n_routes = max(len(route_ids), 1)
        self.slot_budget = np.tile(limits, n_routes)
        self.slot_pairs = [(r, c) for r in route_ids for c in constrained]

        self.order_ids = np.array([o.id for o in orders], dtype=object)
        self.store_pos = np.fromiter(
            (store_index[o.store_id] for o in orders), dtype=np.int64, count=n
        )
        cat_pos = np.fromiter(
            (cat_index[o.category_id] for o in orders), dtype=np.int64, count=n
        )
        wh_pos = np.fromiter(
            (wh_index[o.warehouse_id] for o in orders), dtype=np.int64, count=n
        )
        self.volumes = np.fromiter((o.volume for o in orders), dtype=np.float64, count=n)
        priorities = np.fromiter((o.priority for o in orders), dtype=np.float64, count=n)

        order_active = active_arr[wh_pos] if n else np.zeros(0, dtype=bool)
        order_elig = elig[self.store_pos, cat_pos] if n else np.zeros(0, dtype=bool)
        ok = order_active & order_elig
        self.filter_codes = np.zeros(n, dtype=np.uint8)
        self.filter_codes[~order_active] = 4  # WAREHOUSE_INACTIVE, checked first
        self.filter_codes[order_active & ~order_elig] = 5  # INELIGIBLE_NODE
        self.eligible_idx = np.nonzero(ok)[0]

        route_of_store = np.array(
            [route_index[instance.stores[s].route_id] for s in store_ids],
            dtype=np.int64,
        )
        cat_slot = np.full(max(len(cat_ids), 1), -1, dtype=np.int64)
        for c, slot in con_slot.items():
            cat_slot[cat_index[c]] = slot
        order_slot = cat_slot[cat_pos] if n else np.zeros(0, dtype=np.int64)
        constrained_mask = order_slot >= 0
        self.slot_of_order = np.where(
            constrained_mask,
            route_of_store[self.store_pos] * max(len(constrained), 1) + order_slot,
            -1,
        )

        # Position of each order's id in the id-sorted pool: the final tie-break.
        if n:
            str_ids = self.order_ids.astype(str)
            id_pos = np.empty(n, dtype=np.int64)
            id_pos[np.argsort(str_ids)] = np.arange(n)
        else:
            id_pos = np.zeros(0, dtype=np.int64)
        self.sort_keys = (id_pos, -self.volumes, -priorities, rank_arr[wh_pos] if n else id_pos)

    def sorted_eligible(self) -> np.ndarray:
        idx = self.eligible_idx
        if len(idx) == 0:
            return idx
        id_pos, neg_vol, neg_pri, rank = self.sort_keys
        order = np.lexsort((id_pos[idx], neg_vol[idx], neg_pri[idx], rank[idx]))
        return idx[order]


_FILTER_REASONS = {
    4: RejectionReason.WAREHOUSE_INACTIVE,
    5: RejectionReason.INELIGIBLE_NODE,
}
_PASS_REASONS = {
    REJ_STORE: RejectionReason.STORE_CAPACITY,
    REJ_CATEGORY: RejectionReason.CATEGORY_ROUTE_LIMIT,
}


def allocate(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    backend: str | None = None,
) -> AllocationResult:
    """Run the full filter, sort, cumulative-sweep pipeline on one day's pool."""
    result, _ = allocate_timed(instance, plan, residuals, backend=backend)
    return result


def allocate_timed(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    backend: str | None = None,
) -> tuple[AllocationResult, dict[str, float]]:
    """allocate() plus wall-clock seconds per phase (filter, sort, allocate)."""
    kernel = get_kernel(backend)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    prep = _Prepared(instance, plan, residuals)
    timings["filter"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    seq = prep.sorted_eligible()
    timings["sort"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    status, store_load, slot_load = kernel(
        prep.store_pos[seq],
        prep.slot_of_order[seq],
        prep.volumes[seq],
        prep.store_budget,
        prep.slot_budget,
        CAPACITY_EPS,
    )

    accepted_ids = tuple(prep.order_ids[seq[status == ACCEPTED]])
    rejections: dict[str, RejectionReason] = {}
    for code, reason in _FILTER_REASONS.items():
        for oid in prep.order_ids[prep.filter_codes == code]:
            rejections[oid] = reason
    for code, reason in _PASS_REASONS.items():
        for oid in prep.order_ids[seq[status == code]]:
            rejections[oid] = reason

    store_loads = {s: float(store_load[i]) for i, s in enumerate(prep.store_ids)}
    category_loads = {
        pair: float(load)
        for pair, load in zip(prep.slot_pairs, slot_load)
        if load > 0.0
    }
    result = AllocationResult(
        accepted=accepted_ids,
        store_loads=store_loads,
        category_loads=category_loads,
        rejections=rejections,
        objective_value=objective_value(instance, plan, accepted_ids),
    )
    timings["allocate"] = time.perf_counter() - t0
    return result, timings


def check_feasibility(
    instance: Instance,
    plan: PlanConfig | None,
    residuals: ResidualCapacityMap,
    result: AllocationResult,
) -> list[str]:
    """Independently verify an allocation against every hard constraint.

    Recomputes loads from the raw orders (no engine trackers); returns one
    violation descriptor per breach, empty when feasible. Unknown order ids
    in the result are an input error.
    """
    by_id = {o.id: o for o in instance.orders}
    unknown = [oid for oid in result.accepted if oid not in by_id]
    if unknown:
        raise ValueError(f"result references unknown order ids: {unknown}")

    violations: list[str] = []
    active, _ = effective_plan(instance, plan)

    seen: set[str] = set()
    for oid in result.accepted:
        if oid in seen:
            violations.append(f"binary_selection: order {oid!r} accepted more than once")
        seen.add(oid)

    store_load: dict[str, float] = {}
    cat_load: dict[tuple[str, str], float] = {}
    for oid in result.accepted:
        order = by_id[oid]
        store = instance.stores[order.store_id]
        if not active[order.warehouse_id]:
            violations.append(
                f"warehouse_activation: order {oid!r} dispatched from "
                f"deactivated warehouse {order.warehouse_id!r}"
            )
        if store.eligibility.get(order.category_id, 0) != 1:
            violations.append(
                f"eligibility: order {oid!r} sent to store {store.id!r} "
                f"which cannot receive category {order.category_id!r}"
            )
        store_load[store.id] = store_load.get(store.id, 0.0) + order.volume
        category = instance.categories[order.category_id]
        if category.constrained:
            key = (store.route_id, category.id)
            cat_load[key] = cat_load.get(key, 0.0) + order.volume

    for store_id, load in sorted(store_load.items()):
        budget = residuals.get(store_id)
        if budget is None:
            violations.append(f"store_capacity: store {store_id!r} missing from residuals")
        elif load > budget + CAPACITY_EPS:
            violations.append(
                f"store_capacity: store {store_id!r} load {load} exceeds residual {budget}"
            )
    for (route_id, cat_id), load in sorted(cat_load.items()):
        limit = instance.categories[cat_id].route_limit or 0.0
        if load > limit + CAPACITY_EPS:
            violations.append(
                f"category_route_limit: route {route_id!r} category {cat_id!r} "
                f"load {load} exceeds limit {limit}"
            )
    return violations


def simulate_next_day(
    instance: Instance,
    plan: PlanConfig | None,
    day1: AllocationResult,
    backend: str | None = None,
) -> AllocationResult:
    """Second-day pass: deduct day-1 accepted load, rerun the same pipeline.

    The order pool is the instance pool minus day-1 acceptances; route-category
    trackers start from zero again (the cap is per dispatch cycle).
    """
    day2_residuals = residual_capacities(instance, day1.store_loads)
    taken = set(day1.accepted)
    leftover = tuple(o for o in instance.orders if o.id not in taken)
    next_instance = dataclasses.replace(
        instance, orders=leftover, planning_day=instance.planning_day + 1
    )
    return allocate(next_instance, plan, day2_residuals, backend=backend)
