"""Allocation objective: warehouse rank dominates business priority.

Each selected order contributes ``lam * (max_rank + 1 - rank) + priority``.
The dominance weight ``lam`` is chosen large enough that one unit of
rank-term difference always outweighs any achievable priority-sum
difference, making warehouse precedence lexicographic over priority.
"""

from __future__ import annotations

from typing import Iterable

from .model import Instance, PlanConfig, effective_plan


def lambda_for(instance: Instance) -> float:
    """Dominance weight: 1 + sum of all order priorities.

    The priority-sum difference between any two selections is strictly below
    this value, so a single extra unit of rank term strictly wins.
    """
    return 1.0 + sum(o.priority for o in instance.orders)


def max_active_rank(instance: Instance, plan: PlanConfig | None = None) -> int:
    """Largest effective rank among active warehouses (1 if none are active)."""
    active, ranks = effective_plan(instance, plan)
    active_ranks = [ranks[w] for w, on in active.items() if on]
    return max(active_ranks) if active_ranks else 1


def objective_value(
    instance: Instance, plan: PlanConfig | None, chosen: Iterable[str]
) -> float:
    """Objective of a selection of order ids; unknown ids are an input error."""
    by_id = {o.id: o for o in instance.orders}
    _, ranks = effective_plan(instance, plan)
    lam = lambda_for(instance)
    pi_max = max_active_rank(instance, plan)
    total = 0.0
    for order_id in sorted(chosen):
        order = by_id.get(order_id)
        if order is None:
            raise ValueError(f"unknown order id {order_id!r}")
        total += lam * (pi_max + 1 - ranks[order.warehouse_id]) + order.priority
    return total


def order_coefficients(
    instance: Instance, plan: PlanConfig | None = None
) -> dict[str, float]:
    """Per-order objective coefficient, keyed by order id."""
    _, ranks = effective_plan(instance, plan)
    lam = lambda_for(instance)
    pi_max = max_active_rank(instance, plan)
    return {
        o.id: lam * (pi_max + 1 - ranks[o.warehouse_id]) + o.priority
        for o in instance.orders
    }
