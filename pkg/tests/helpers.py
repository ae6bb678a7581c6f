"""Compact builders for hand-written test instances."""

from __future__ import annotations

from typing import Mapping, Sequence

from allocdss.model import Category, Instance, Order, Route, Store, Warehouse


def mini_instance(
    orders: Sequence[tuple[str, str, str, str, float, float]],
    stores: Mapping[str, tuple[str, float, float]],
    categories: Mapping[str, float | None] | None = None,
    warehouses: Mapping[str, int] | None = None,
    ineligible: Sequence[tuple[str, str]] = (),
    inactive: Sequence[str] = (),
    planning_day: int = 1,
) -> Instance:
    """Build a small instance from terse tuples.

    orders: (id, store_id, warehouse_id, category_id, volume, priority)
    stores: store_id -> (route_id, base_capacity, flow_through_deduction)
    categories: category_id -> route_limit (None means unconstrained);
        defaults to one unconstrained category "c1"
    warehouses: warehouse_id -> rank; defaults to {"w1": 1}; all active except
        the ids listed in ``inactive``
    ineligible: (store_id, category_id) pairs flipped to 0, everything else 1
    """
    categories = dict(categories) if categories else {"c1": None}
    warehouses = dict(warehouses) if warehouses else {"w1": 1}
    blocked = set(ineligible)
    return Instance(
        orders=tuple(Order(*row) for row in orders),
        stores={
            sid: Store(
                id=sid,
                route_id=route,
                base_capacity=base,
                flow_through_deduction=flow,
                eligibility={
                    cid: 0 if (sid, cid) in blocked else 1 for cid in categories
                },
            )
            for sid, (route, base, flow) in stores.items()
        },
        routes={route: Route(id=route) for route, _, _ in stores.values()},
        categories={
            cid: Category(id=cid, constrained=limit is not None, route_limit=limit)
            for cid, limit in categories.items()
        },
        warehouses={
            wid: Warehouse(id=wid, active=wid not in set(inactive), rank=rank)
            for wid, rank in warehouses.items()
        },
        planning_day=planning_day,
    )
