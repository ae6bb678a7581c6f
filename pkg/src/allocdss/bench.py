"""Runtime and solution-quality benchmarks.

Scaling mode times the allocation pipeline (filter, sort, sweep) on
in-memory instances of doubling size, so the numbers measure the algorithm
rather than file I/O. Gap mode scores the heuristic against the exact
branch-and-bound optimum on batches of small seeded instances. Backend mode
compares the compiled kernel against the pure-Python fallback on identical
inputs and checks they return the same acceptance sequence.
"""

from __future__ import annotations

import gc
import statistics
from dataclasses import dataclass

from ._kernels import available_backends
from .engine import allocate_timed
from .generator import GeneratorSpec, generate
from .model import Instance, PlanConfig, residual_capacities
from .oracle import GapReport, gap_report

__all__ = [
    "ScalingPoint",
    "GapSummary",
    "scaling_instance_spec",
    "run_scaling",
    "doubling_ratios",
    "run_gap",
    "compare_backends",
]


@dataclass(frozen=True, slots=True)
class ScalingPoint:
    n_orders: int
    median_seconds: float
    phase_seconds: dict[str, float]  # median per pipeline phase
    repeats: int


@dataclass(frozen=True, slots=True)
class GapSummary:
    n_instances: int
    n_optimal: int  # oracle runs that proved optimality within budget
    mean_gap: float
    max_gap: float
    reports: tuple[GapReport, ...]


def scaling_instance_spec(n_orders: int, seed: int = 20_260_101) -> GeneratorSpec:
    """Benchmark shape: roughly 275 orders per store, 3 warehouses, 8 routes."""
    n_stores = max(8, n_orders // 275)
    return GeneratorSpec(
        seed=seed,
        n_orders=n_orders,
        n_stores=n_stores,
        n_routes=min(8, n_stores),
        n_categories=12,
        n_warehouses=3,
        constrained_category_fraction=0.5,
        capacity_tightness=0.8,
        category_tightness=1.2,
        eligibility_density=0.95,
        priority_levels=5,
    )


def _time_allocation(
    instance: Instance, repeats: int, backend: str | None
) -> tuple[float, dict[str, float], int]:
    plan = PlanConfig.from_instance(instance)
    residuals = residual_capacities(instance)
    totals: list[float] = []
    phases: dict[str, list[float]] = {}

    # one untimed warmup, then measure with the collector parked so a GC
    # pause from unrelated garbage cannot land inside a repeat (same policy
    # as timeit's default)
    result, _ = allocate_timed(instance, plan, residuals, backend=backend)
    accepted = len(result.accepted)
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(repeats):
            _, timings = allocate_timed(instance, plan, residuals, backend=backend)
            totals.append(sum(timings.values()))
            for phase, seconds in timings.items():
                phases.setdefault(phase, []).append(seconds)
    finally:
        if was_enabled:
            gc.enable()
    return (
        statistics.median(totals),
        {phase: statistics.median(values) for phase, values in phases.items()},
        accepted,
    )


def run_scaling(
    sizes: list[int], repeats: int = 5, seed: int = 20_260_101, backend: str | None = None
) -> list[ScalingPoint]:
    # Repeats are interleaved across sizes (run 1 of every size, then run 2,
    # ...) so a transient stall on the host is spread over all sizes instead
    # of landing inside one size's whole block and skewing its median.
    prepared = []
    for n in sizes:
        instance = generate(scaling_instance_spec(n, seed=seed))
        prepared.append(
            (instance, PlanConfig.from_instance(instance), residual_capacities(instance))
        )

    totals: list[list[float]] = [[] for _ in sizes]
    phases: list[dict[str, list[float]]] = [{} for _ in sizes]
    for instance, plan, residuals in prepared:  # untimed warmup
        allocate_timed(instance, plan, residuals, backend=backend)
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        for _ in range(repeats):
            for i, (instance, plan, residuals) in enumerate(prepared):
                _, timings = allocate_timed(instance, plan, residuals, backend=backend)
                totals[i].append(sum(timings.values()))
                for phase, seconds in timings.items():
                    phases[i].setdefault(phase, []).append(seconds)
    finally:
        if was_enabled:
            gc.enable()

    return [
        ScalingPoint(
            n_orders=n,
            median_seconds=statistics.median(totals[i]),
            phase_seconds={p: statistics.median(v) for p, v in phases[i].items()},
            repeats=repeats,
        )
        for i, n in enumerate(sizes)
    ]


def doubling_ratios(points: list[ScalingPoint]) -> list[float]:
    """Median-time ratio of each size step to the previous one."""
    return [
        b.median_seconds / a.median_seconds if a.median_seconds > 0 else float("inf")
        for a, b in zip(points, points[1:])
    ]


def gap_instance_spec(seed: int, n_orders: int, loose: bool) -> GeneratorSpec:
    """Small-instance shape for oracle comparison; loose flips both tightness knobs."""
    return GeneratorSpec(
        seed=seed,
        n_orders=n_orders,
        n_stores=4,
        n_routes=2,
        n_categories=3,
        n_warehouses=2,
        constrained_category_fraction=1.0 / 3.0,
        capacity_tightness=2.5 if loose else 0.6,
        category_tightness=2.5 if loose else 0.7,
        eligibility_density=0.9,
        priority_levels=3,
    )


def run_gap(
    n_instances: int,
    n_orders: int = 15,
    seed0: int = 1000,
    loose: bool = False,
    max_nodes: int = 2_000_000,
) -> GapSummary:
    reports = []
    for i in range(n_instances):
        instance = generate(gap_instance_spec(seed0 + i, n_orders, loose))
        plan = PlanConfig.from_instance(instance)
        reports.append(
            gap_report(instance, plan, residual_capacities(instance), max_nodes=max_nodes)
        )
    gaps = [r.relative_gap for r in reports]
    return GapSummary(
        n_instances=len(reports),
        n_optimal=sum(r.usable for r in reports),
        mean_gap=statistics.fmean(gaps) if gaps else 0.0,
        max_gap=max(gaps, default=0.0),
        reports=tuple(reports),
    )


def compare_backends(
    n_orders: int = 50_000, repeats: int = 5, seed: int = 20_260_101
) -> dict[str, dict[str, float]]:
    """Median pipeline seconds per available kernel backend on one instance.

    Raises if the backends disagree on the acceptance count, which would mean
    the compiled kernel diverged from the reference fallback.
    """
    instance = generate(scaling_instance_spec(n_orders, seed=seed))
    out: dict[str, dict[str, float]] = {}
    accepted_counts = {}
    for backend in available_backends():
        median, phases, accepted = _time_allocation(instance, repeats, backend)
        accepted_counts[backend] = accepted
        out[backend] = {"median_seconds": median, **phases}
    if len(set(accepted_counts.values())) > 1:
        raise AssertionError(f"kernel backends disagree: {accepted_counts}")
    return out
