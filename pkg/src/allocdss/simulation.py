"""Rolling multi-day allocation simulation with backlog carryover.

Each day's pool is that day's new orders plus the still-shippable leftovers
from previous days; store capacities reset every morning (the residual is a
daily receiving budget, not a depleting stock). Orders rejected for
structural reasons (ineligible store-category pair, deactivated warehouse)
can never ship under the fixed network and are dropped instead of clogging
the backlog.

The allocation policy is pluggable so alternative allocators can be compared
on byte-identical carryover mechanics.
"""

from __future__ import annotations

import dataclasses
from datetime import date as Date
from datetime import timedelta
from typing import Callable, Sequence

from .engine import allocate
from .kpi import records_from_allocation
from .model import (
    AllocationResult,
    DailyServiceRecord,
    Instance,
    Order,
    PlanConfig,
    RejectionReason,
    ResidualCapacityMap,
    residual_capacities,
)

__all__ = ["Allocator", "rolling_records"]

Allocator = Callable[[Instance, PlanConfig, ResidualCapacityMap], AllocationResult]

_STRUCTURAL = (RejectionReason.WAREHOUSE_INACTIVE, RejectionReason.INELIGIBLE_NODE)


def rolling_records(
    days: Sequence[Instance],
    plan: PlanConfig,
    start_date: Date,
    allocator: Allocator | None = None,
) -> list[DailyServiceRecord]:
    """Simulate the whole series and return one record per store per day.

    ``days`` come from :func:`allocdss.generator.generate_daily_series` (or any
    list of same-network instances). A record's requested volume counts the
    full pool facing the store that day, carryover included.
    """
    if allocator is None:
        allocator = allocate
    records: list[DailyServiceRecord] = []
    backlog: tuple[Order, ...] = ()
    for offset, day in enumerate(days):
        pool = dataclasses.replace(day, orders=backlog + day.orders)
        residuals = residual_capacities(pool)
        result = allocator(pool, plan, residuals)
        records.extend(
            records_from_allocation(pool, result, residuals, start_date + timedelta(days=offset))
        )
        accepted = set(result.accepted)
        backlog = tuple(
            o
            for o in pool.orders
            if o.id not in accepted and result.rejections.get(o.id) not in _STRUCTURAL
        )
    return records
