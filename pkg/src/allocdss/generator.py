"""Seeded synthetic instance generation.

Instances are drawn from a counter-based Philox random stream (numpy's
``np.random.Philox``), which has published constants and identical output on
every platform, so golden values frozen in tests are portable. The draw
sequence inside :func:`generate` is part of the contract and must never be
reordered: volumes, store assignment, warehouse assignment, category
assignment, priority tiers, then the store-category eligibility matrix.

Capacities are demand-derived rather than absolute: each store's base
capacity is ``round(capacity_tightness * its total requested volume)``, so
one tightness knob moves the whole instance from starved to slack without
retuning volumes. Route limits for constrained categories scale the same way
from the busiest route's demand in that category.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .model import Category, Instance, Order, Route, Store, Warehouse

__all__ = ["VolumeDistribution", "GeneratorSpec", "generate", "generate_daily_series"]


@dataclass(frozen=True, slots=True)
class VolumeDistribution:
    """Order volume law: uniform(lo, hi) or lognormal(mu, sigma)."""

    kind: str = "uniform"
    lo: float = 1.0
    hi: float = 5.0
    mu: float = 0.0
    sigma: float = 0.5

    def check(self) -> list[str]:
        problems: list[str] = []
        if self.kind not in ("uniform", "lognormal"):
            problems.append(f"volume_distribution.kind: unknown kind {self.kind!r}")
        if self.kind == "uniform":
            if not 0.0 < self.lo <= self.hi:
                problems.append(
                    f"volume_distribution: need 0 < lo <= hi, got lo={self.lo} hi={self.hi}"
                )
        if self.kind == "lognormal" and self.sigma < 0:
            problems.append(f"volume_distribution.sigma: {self.sigma} < 0")
        return problems

    def mean(self) -> float:
        if self.kind == "uniform":
            return (self.lo + self.hi) / 2.0
        return math.exp(self.mu + self.sigma**2 / 2.0)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi, size=n)
        return rng.lognormal(self.mu, self.sigma, size=n)


@dataclass(frozen=True, slots=True)
class GeneratorSpec:
    """Everything that determines a synthetic instance, including the seed."""

    seed: int
    n_orders: int = 100
    n_stores: int = 10
    n_routes: int = 3
    n_categories: int = 4
    n_warehouses: int = 2
    constrained_category_fraction: float = 0.5
    capacity_tightness: float = 1.0
    category_tightness: float = 1.5
    eligibility_density: float = 1.0
    volume_distribution: VolumeDistribution = field(default_factory=VolumeDistribution)
    priority_levels: int = 3
    flow_through_fraction: float = 0.10

    def check(self) -> list[str]:
        problems: list[str] = []
        if self.seed < 0:
            problems.append(f"seed: {self.seed} < 0")
        for name in ("n_orders", "n_stores", "n_routes", "n_categories", "n_warehouses"):
            if getattr(self, name) < 1:
                problems.append(f"{name}: {getattr(self, name)} < 1")
        if self.n_stores < self.n_routes:
            problems.append(f"n_stores: {self.n_stores} < n_routes {self.n_routes}")
        for name in (
            "constrained_category_fraction",
            "eligibility_density",
            "flow_through_fraction",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name}: {value} outside [0, 1]")
        if self.capacity_tightness <= 0:
            problems.append(f"capacity_tightness: {self.capacity_tightness} <= 0")
        if self.category_tightness <= 0:
            problems.append(f"category_tightness: {self.category_tightness} <= 0")
        if self.priority_levels < 1:
            problems.append(f"priority_levels: {self.priority_levels} < 1")
        problems.extend(self.volume_distribution.check())
        return problems


def _require_valid(spec: GeneratorSpec) -> None:
    problems = spec.check()
    if problems:
        raise ValueError("invalid generator spec: " + "; ".join(problems))


def _order_id(index: int) -> str:
    return f"o{index:08d}"


def _draw_order_arrays(
    rng: np.random.Generator, spec: GeneratorSpec, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """One day's raw order attributes, in the fixed contract draw sequence."""
    volumes = spec.volume_distribution.sample(rng, n)
    store_idx = rng.integers(0, spec.n_stores, size=n)
    wh_idx = rng.integers(0, spec.n_warehouses, size=n)
    cat_idx = rng.integers(0, spec.n_categories, size=n)
    priorities = rng.integers(1, spec.priority_levels + 1, size=n)
    return volumes, store_idx, wh_idx, cat_idx, priorities


def generate(spec: GeneratorSpec) -> Instance:
    """Build one valid instance; the same spec always yields the same instance."""
    _require_valid(spec)
    rng = np.random.Generator(np.random.Philox(spec.seed))

    n = spec.n_orders
    volumes, store_idx, wh_idx, cat_idx, priorities = _draw_order_arrays(rng, spec, n)
    elig_matrix = rng.random((spec.n_stores, spec.n_categories)) < spec.eligibility_density

    store_ids = [f"s{i + 1:05d}" for i in range(spec.n_stores)]
    route_ids = [f"r{i + 1:03d}" for i in range(spec.n_routes)]
    cat_ids = [f"c{i + 1:03d}" for i in range(spec.n_categories)]
    wh_ids = [f"w{i + 1:02d}" for i in range(spec.n_warehouses)]

    store_demand = np.bincount(store_idx, weights=volumes, minlength=spec.n_stores)

    # Demand per (route, category) drives constrained-category limits; the
    # limit is shared by all routes, sized from the busiest one.
    route_of_store = np.arange(spec.n_stores) % spec.n_routes
    route_cat = np.bincount(
        route_of_store[store_idx] * spec.n_categories + cat_idx,
        weights=volumes,
        minlength=spec.n_routes * spec.n_categories,
    ).reshape(spec.n_routes, spec.n_categories)
    peak_route_demand = route_cat.max(axis=0)

    n_constrained = int(round(spec.constrained_category_fraction * spec.n_categories))
    categories = {}
    for c, cat_id in enumerate(cat_ids):
        constrained = c < n_constrained
        categories[cat_id] = Category(
            id=cat_id,
            constrained=constrained,
            route_limit=float(spec.category_tightness * peak_route_demand[c])
            if constrained
            else None,
        )

    stores = {}
    for s, store_id in enumerate(store_ids):
        base = float(round(spec.capacity_tightness * store_demand[s]))
        stores[store_id] = Store(
            id=store_id,
            route_id=route_ids[route_of_store[s]],
            base_capacity=base,
            flow_through_deduction=spec.flow_through_fraction * base,
            eligibility={cat_ids[c]: int(elig_matrix[s, c]) for c in range(spec.n_categories)},
        )

    orders = tuple(
        Order(
            id=_order_id(i + 1),
            store_id=store_ids[store_idx[i]],
            warehouse_id=wh_ids[wh_idx[i]],
            category_id=cat_ids[cat_idx[i]],
            volume=float(volumes[i]),
            priority=float(priorities[i]),
        )
        for i in range(n)
    )

    return Instance(
        orders=orders,
        stores=stores,
        routes={r: Route(id=r) for r in route_ids},
        categories=categories,
        warehouses={
            w: Warehouse(id=w, active=True, rank=i + 1) for i, w in enumerate(wh_ids)
        },
        planning_day=1,
    )


def generate_daily_series(
    spec: GeneratorSpec, n_days: int, demand_volatility: float
) -> list[Instance]:
    """Rolling multi-day pools over one fixed network.

    Day 1 is exactly ``generate(spec)``. Each later day draws from an
    independent jumped Philox stream: a lognormal demand multiplier m with
    E[m] = 1 scales both that day's order count and (after rescaling) its
    total requested volume, so volatility=0 reproduces day 1's totals. Stores,
    routes, categories, warehouses, and capacities stay fixed; order ids keep
    counting up across days so a merged pool stays collision-free.
    """
    _require_valid(spec)
    if n_days < 1:
        raise ValueError(f"n_days must be >= 1, got {n_days}")
    if demand_volatility < 0:
        raise ValueError(f"demand_volatility must be >= 0, got {demand_volatility}")

    day1 = generate(spec)
    day1_total = float(sum(o.volume for o in day1.orders))
    days = [day1]
    next_id = spec.n_orders + 1

    store_ids = sorted(day1.stores)
    cat_ids = sorted(day1.categories)
    wh_ids = sorted(day1.warehouses)

    for t in range(2, n_days + 1):
        rng = np.random.Generator(np.random.Philox(spec.seed).jumped(t - 1))
        multiplier = float(
            rng.lognormal(-0.5 * demand_volatility**2, demand_volatility)
        )
        n_t = max(1, round(multiplier * spec.n_orders))
        volumes, store_idx, wh_idx, cat_idx, priorities = _draw_order_arrays(rng, spec, n_t)
        volumes = volumes * (multiplier * day1_total / float(volumes.sum()))

        orders = tuple(
            Order(
                id=_order_id(next_id + i),
                store_id=store_ids[store_idx[i]],
                warehouse_id=wh_ids[wh_idx[i]],
                category_id=cat_ids[cat_idx[i]],
                volume=float(volumes[i]),
                priority=float(priorities[i]),
            )
            for i in range(n_t)
        )
        next_id += n_t
        days.append(dataclasses.replace(day1, orders=orders, planning_day=t))

    return days
