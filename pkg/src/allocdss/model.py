"""Domain types for capacity-constrained retail allocation.

All types are immutable values after construction and safe to share across
concurrent engine runs. Volumes and capacities are real-valued; every
"fits under capacity" comparison in the project uses the shared absolute
tolerance ``CAPACITY_EPS`` so accumulated float error never causes spurious
rejections.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import date as Date
from typing import Mapping

#: Absolute tolerance for all <= capacity checks (engine, oracle, feasibility).
CAPACITY_EPS = 1e-9


class RejectionReason(enum.Enum):
    """Why an order was not accepted; first failing check in pipeline order."""

    WAREHOUSE_INACTIVE = "WAREHOUSE_INACTIVE"
    INELIGIBLE_NODE = "INELIGIBLE_NODE"
    STORE_CAPACITY = "STORE_CAPACITY"
    CATEGORY_ROUTE_LIMIT = "CATEGORY_ROUTE_LIMIT"


@dataclass(frozen=True, slots=True)
class Order:
    """One pending order line.

    volume is the dimensional shipping weight (strictly positive); priority is
    a non-negative business weight. All three references must resolve within
    the owning Instance.
    """

    id: str
    store_id: str
    warehouse_id: str
    category_id: str
    volume: float
    priority: float


@dataclass(frozen=True, slots=True)
class Store:
    id: str
    route_id: str
    base_capacity: float
    flow_through_deduction: float
    eligibility: Mapping[str, int]  # category_id -> 0/1, one entry per category


@dataclass(frozen=True, slots=True)
class Route:
    id: str


@dataclass(frozen=True, slots=True)
class Category:
    """Product category; constrained categories carry a per-route cumulative cap.

    The same route_limit value applies independently on every route.
    """

    id: str
    constrained: bool = False
    route_limit: float | None = None


@dataclass(frozen=True, slots=True)
class Warehouse:
    """Outbound warehouse with default activation and priority rank (1 = highest)."""

    id: str
    active: bool = True
    rank: int = 1


@dataclass(frozen=True, slots=True)
class Instance:
    """A full planning-cycle input: orders plus keyed entity collections."""

    orders: tuple[Order, ...]
    stores: Mapping[str, Store]
    routes: Mapping[str, Route]
    categories: Mapping[str, Category]
    warehouses: Mapping[str, Warehouse]
    planning_day: int = 1


@dataclass(frozen=True, slots=True)
class PlanConfig:
    """Planner-chosen warehouse activation flags and priority ranks for one run.

    Warehouses absent from ``activations`` are treated as deactivated. Ranks are
    required (and must be distinct) for every activated warehouse.
    """

    activations: Mapping[str, bool]
    ranks: Mapping[str, int]

    @classmethod
    def from_instance(cls, instance: Instance) -> "PlanConfig":
        """Default plan: the instance's own activation flags and ranks."""
        return cls(
            activations={w.id: w.active for w in instance.warehouses.values()},
            ranks={w.id: w.rank for w in instance.warehouses.values() if w.active},
        )

    def active_warehouses(self) -> list[str]:
        return sorted(w for w, on in self.activations.items() if on)


@dataclass(frozen=True, slots=True)
class AllocationResult:
    """Outcome of one allocation run.

    ``accepted`` preserves the acceptance sequence; ``rejections`` covers every
    input-pool order that was not accepted; loads are recomputable from the raw
    orders.
    """

    accepted: tuple[str, ...]
    store_loads: Mapping[str, float]
    category_loads: Mapping[tuple[str, str], float]  # (route_id, category_id) -> volume
    rejections: Mapping[str, RejectionReason]
    objective_value: float


@dataclass(frozen=True, slots=True)
class DailyServiceRecord:
    """One (store, calendar day) service observation used for KPI evaluation."""

    date: Date
    store_id: str
    requested: float
    shipped: float
    store_limit: float


#: Per-store residual receiving capacity for one planning day (>= 0).
ResidualCapacityMap = dict[str, float]


def validate_instance(instance: Instance) -> list[str]:
    """Check every type invariant; returns violation descriptors (empty = valid).

    Violations are data, not failures: each string names the entity and the
    rule it breaks.
    """
    violations: list[str] = []

    for label, mapping in (
        ("store", instance.stores),
        ("route", instance.routes),
        ("category", instance.categories),
        ("warehouse", instance.warehouses),
    ):
        for key, entity in mapping.items():
            if key != entity.id:
                violations.append(f"{label} {entity.id!r}: keyed as {key!r} in its collection")

    if not instance.warehouses:
        violations.append("instance: must contain at least one warehouse")

    for cat in instance.categories.values():
        if cat.constrained:
            if cat.route_limit is None:
                violations.append(f"category {cat.id!r}: constrained but route_limit missing")
            elif cat.route_limit < 0:
                violations.append(f"category {cat.id!r}: route_limit {cat.route_limit} < 0")

    for store in instance.stores.values():
        if store.route_id not in instance.routes:
            violations.append(f"store {store.id!r}: unknown route {store.route_id!r}")
        if store.base_capacity < 0:
            violations.append(f"store {store.id!r}: base_capacity {store.base_capacity} < 0")
        if store.flow_through_deduction < 0:
            violations.append(
                f"store {store.id!r}: flow_through_deduction {store.flow_through_deduction} < 0"
            )
        for cat_id in instance.categories:
            flag = store.eligibility.get(cat_id)
            if flag not in (0, 1):
                violations.append(
                    f"store {store.id!r}: eligibility for category {cat_id!r} must be 0 or 1"
                )

    for wh in instance.warehouses.values():
        if wh.rank < 1:
            violations.append(f"warehouse {wh.id!r}: rank {wh.rank} < 1")
    active_ranks: dict[int, str] = {}
    for wh in sorted(instance.warehouses.values(), key=lambda w: w.id):
        if not wh.active:
            continue
        if wh.rank in active_ranks:
            violations.append(
                f"warehouse {wh.id!r}: duplicate rank {wh.rank} "
                f"(shared with active warehouse {active_ranks[wh.rank]!r})"
            )
        else:
            active_ranks[wh.rank] = wh.id

    seen_orders: set[str] = set()
    for order in instance.orders:
        if order.id in seen_orders:
            violations.append(f"order {order.id!r}: duplicate order id")
        seen_orders.add(order.id)
        if order.volume <= 0:
            violations.append(f"order {order.id!r}: volume {order.volume} must be > 0")
        if order.priority < 0:
            violations.append(f"order {order.id!r}: priority {order.priority} < 0")
        if order.store_id not in instance.stores:
            violations.append(f"order {order.id!r}: unknown store {order.store_id!r}")
        if order.warehouse_id not in instance.warehouses:
            violations.append(f"order {order.id!r}: unknown warehouse {order.warehouse_id!r}")
        if order.category_id not in instance.categories:
            violations.append(f"order {order.id!r}: unknown category {order.category_id!r}")

    return violations


def validate_plan(plan: PlanConfig, instance: Instance) -> list[str]:
    """Check plan invariants against an instance; returns violation descriptors."""
    violations: list[str] = []
    for wh_id in plan.activations:
        if wh_id not in instance.warehouses:
            violations.append(f"plan.activations.{wh_id}: unknown warehouse")
    for wh_id in plan.ranks:
        if wh_id not in instance.warehouses:
            violations.append(f"plan.ranks.{wh_id}: unknown warehouse")

    active = [w for w, on in sorted(plan.activations.items()) if on]
    if not active:
        violations.append("plan.activations: at least one warehouse must be activated")

    rank_owner: dict[int, str] = {}
    for wh_id in active:
        rank = plan.ranks.get(wh_id)
        if rank is None:
            violations.append(f"plan.ranks.{wh_id}: activated warehouse has no rank")
            continue
        if rank < 1:
            violations.append(f"plan.ranks.{wh_id}: rank {rank} < 1")
        if rank in rank_owner:
            violations.append(
                f"plan.ranks.{wh_id}: duplicate rank {rank} (shared with {rank_owner[rank]!r})"
            )
        else:
            rank_owner[rank] = wh_id
    return violations


def residual_capacities(
    instance: Instance, prior_accepted_load: Mapping[str, float] | None = None
) -> ResidualCapacityMap:
    """Per-store residual capacity: max(0, base - flow_through - prior accepted).

    ``prior_accepted_load`` may cover any subset of stores (missing = 0); an
    unknown store id is an input error.
    """
    prior = dict(prior_accepted_load or {})
    unknown = set(prior) - set(instance.stores)
    if unknown:
        raise ValueError(f"prior_accepted_load names unknown stores: {sorted(unknown)}")
    return {
        s.id: max(0.0, s.base_capacity - s.flow_through_deduction - prior.get(s.id, 0.0))
        for s in instance.stores.values()
    }


def effective_plan(
    instance: Instance, plan: PlanConfig | None
) -> tuple[dict[str, bool], dict[str, int]]:
    """Resolve activation flags and ranks for a run.

    With no plan, the instance's own warehouse fields apply. With a plan,
    warehouses it does not activate are inactive; ranks of active warehouses
    come from the plan, inactive ones keep their instance rank (they can only
    matter for scoring hand-built infeasible sets).
    """
    if plan is None:
        active = {w.id: w.active for w in instance.warehouses.values()}
        ranks = {w.id: w.rank for w in instance.warehouses.values()}
        return active, ranks
    active = {w_id: bool(plan.activations.get(w_id, False)) for w_id in instance.warehouses}
    ranks = {}
    for w_id, wh in instance.warehouses.items():
        ranks[w_id] = int(plan.ranks.get(w_id, wh.rank))
    return active, ranks
