"""Warehouse dispatch allocation: engine, oracle, generator, KPIs, and I/O.

The core workflow is ``generate`` (or load) an :class:`Instance`, pick a
:class:`PlanConfig` with warehouse activations and precedence ranks, then
:func:`allocate` against per-store residual capacities. Everything else
(exact oracle, KPI statistics, persistence, HTTP service, CLI) hangs off
those three types. The HTTP layer lives in :mod:`allocdss.service` and is
imported on demand to keep library imports light.
"""

from ._kernels import DEFAULT_BACKEND, HAVE_COMPILED, available_backends
from .engine import (
    allocate,
    allocate_timed,
    check_feasibility,
    filter_eligible,
    simulate_next_day,
    sort_eligible,
)
from .generator import GeneratorSpec, VolumeDistribution, generate, generate_daily_series
from .kpi import (
    BeforeAfterComparison,
    KpiReport,
    before_after,
    compliance_shares,
    daily_series,
    kpi_report,
    mann_whitney_u,
    records_from_allocation,
    same_day_coverage,
    ship_order_ratio,
)
from .model import (
    CAPACITY_EPS,
    AllocationResult,
    Category,
    DailyServiceRecord,
    Instance,
    Order,
    PlanConfig,
    RejectionReason,
    ResidualCapacityMap,
    Route,
    Store,
    Warehouse,
    effective_plan,
    residual_capacities,
    validate_instance,
    validate_plan,
)
from .objective import lambda_for, max_active_rank, objective_value
from .oracle import GapReport, OracleSolution, gap_report, solve_enumeration, solve_exact
from .simulation import rolling_records

__version__ = "0.1.0"

__all__ = [
    "CAPACITY_EPS",
    "DEFAULT_BACKEND",
    "HAVE_COMPILED",
    "AllocationResult",
    "BeforeAfterComparison",
    "Category",
    "DailyServiceRecord",
    "GapReport",
    "GeneratorSpec",
    "Instance",
    "KpiReport",
    "OracleSolution",
    "Order",
    "PlanConfig",
    "RejectionReason",
    "ResidualCapacityMap",
    "Route",
    "Store",
    "VolumeDistribution",
    "Warehouse",
    "allocate",
    "allocate_timed",
    "available_backends",
    "before_after",
    "check_feasibility",
    "compliance_shares",
    "daily_series",
    "effective_plan",
    "filter_eligible",
    "gap_report",
    "generate",
    "generate_daily_series",
    "kpi_report",
    "lambda_for",
    "mann_whitney_u",
    "max_active_rank",
    "objective_value",
    "records_from_allocation",
    "residual_capacities",
    "rolling_records",
    "same_day_coverage",
    "ship_order_ratio",
    "simulate_next_day",
    "solve_enumeration",
    "solve_exact",
    "sort_eligible",
    "validate_instance",
    "validate_plan",
]
