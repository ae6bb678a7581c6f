"""Service and compliance metrics over store-day records.

All metrics are pure functions of DailyServiceRecord lists. "Weighted"
ratios pool volumes before dividing (sum of shipped over sum of requested),
so large stores move the number more than small ones; the per-day series
exposes the unweighted daily values that the rank test runs on.

The Mann-Whitney U implementation handles ties via midranks. Small samples
(min size <= 8) get an exact conditional p-value by dynamic programming over
the observed rank multiset; larger samples use the tie-corrected normal
approximation with continuity correction.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date as Date
from typing import Iterable, Mapping, Sequence

from .model import AllocationResult, DailyServiceRecord, Instance, ResidualCapacityMap

__all__ = [
    "KpiReport",
    "BeforeAfterComparison",
    "DailySeriesPoint",
    "ship_order_ratio",
    "same_day_coverage",
    "compliance_shares",
    "mann_whitney_u",
    "daily_series",
    "kpi_report",
    "before_after",
    "records_from_allocation",
]

_EXACT_MIN_SIZE = 8  # at or below this min sample size, use the exact p-value


@dataclass(frozen=True, slots=True)
class KpiReport:
    """Pooled service metrics over one set of store-day records."""

    ship_order_ratio: float
    same_day_coverage: float
    avg_daily_unserved: float
    share_order_over_limit: float
    share_ship_over_limit: float
    share_full_fulfillment: float
    n_days: int
    n_store_days: int


@dataclass(frozen=True, slots=True)
class BeforeAfterComparison:
    """Two KpiReports around a go-live cutoff plus deltas and the rank test.

    Delta keys ending in _pp are percentage-point differences (after minus
    before, times 100); keys ending in _pct_change are relative changes in
    percent, None when the before value is zero. The U statistic belongs to
    the after-period sample of daily coverage values.
    """

    before: KpiReport
    after: KpiReport
    deltas: Mapping[str, float | None]
    mannwhitney_u: float
    p_value_two_sided: float


@dataclass(frozen=True, slots=True)
class DailySeriesPoint:
    """Per-calendar-day pooled totals; ratios are None on zero-demand days."""

    date: Date
    requested: float
    shipped: float
    ship_order_ratio: float | None
    same_day_coverage: float | None


def ship_order_ratio(records: Sequence[DailyServiceRecord]) -> float:
    """Total shipped over total requested; may exceed 1 when backlog ships."""
    total_requested = sum(r.requested for r in records)
    if total_requested <= 0:
        raise ValueError("ship_order_ratio undefined: total requested volume is zero")
    return sum(r.shipped for r in records) / total_requested


def same_day_coverage(records: Sequence[DailyServiceRecord]) -> float:
    """Demand-bounded coverage: sum of min(shipped, requested) over sum requested."""
    total_requested = sum(r.requested for r in records)
    if total_requested <= 0:
        raise ValueError("same_day_coverage undefined: total requested volume is zero")
    served = sum(min(r.shipped, r.requested) for r in records)
    return served / total_requested


def compliance_shares(
    records: Sequence[DailyServiceRecord],
) -> tuple[float, float, float, float]:
    """(order>limit share, ship>limit share, full-fulfillment share, avg daily unserved).

    Shares are fractions of store-day records; unserved volume is clamped at
    zero per store-day, summed per calendar day, then averaged over days.
    """
    if not records:
        raise ValueError("compliance_shares undefined on an empty record set")
    n = len(records)
    order_over = sum(1 for r in records if r.requested > r.store_limit) / n
    ship_over = sum(1 for r in records if r.shipped > r.store_limit) / n
    full = sum(1 for r in records if r.shipped >= r.requested) / n

    unserved_by_day: dict[Date, float] = defaultdict(float)
    for r in records:
        unserved_by_day[r.date] += max(0.0, r.requested - r.shipped)
    avg_unserved = sum(unserved_by_day.values()) / len(unserved_by_day)
    return order_over, ship_over, full, avg_unserved


def _midranks(pooled: Sequence[float]) -> list[float]:
    """Ranks 1..n with tied values sharing the mean of their positions."""
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        mid = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _exact_two_sided_p(scaled: list[int], n_a: int, twice_u_obs: int) -> float:
    """Exact conditional two-sided p for U given the pooled rank multiset.

    ``scaled`` holds doubled midranks (integers even under ties). Dynamic
    programming counts, for every achievable rank-sum, how many of the
    C(n, n_a) equally likely group-A labelings reach it; both tails include
    the observed value. Counts are exact big integers.
    """
    counts: list[dict[int, int]] = [defaultdict(int) for _ in range(n_a + 1)]
    counts[0][0] = 1
    for value in scaled:
        for k in range(min(n_a, len(scaled)), 0, -1):
            lower = counts[k - 1]
            if not lower:
                continue
            bucket = counts[k]
            for rank_sum, ways in lower.items():
                bucket[rank_sum + value] += ways
    distribution = counts[n_a]
    total = math.comb(len(scaled), n_a)
    shift = n_a * (n_a + 1)  # 2U = 2*rank_sum_a - n_a(n_a+1), here sums are doubled
    low = sum(w for s, w in distribution.items() if s - shift <= twice_u_obs)
    high = sum(w for s, w in distribution.items() if s - shift >= twice_u_obs)
    return min(1.0, 2.0 * min(low, high) / total)


def mann_whitney_u(
    sample_a: Sequence[float], sample_b: Sequence[float]
) -> tuple[float, float]:
    """Rank-sum U for sample_a and a two-sided p-value.

    Midranks handle ties. When the smaller sample has at most 8 values the
    p-value is exact (conditional on the observed tie pattern); otherwise the
    tie-corrected normal approximation with continuity correction applies.
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a == 0 or n_b == 0:
        raise ValueError("mann_whitney_u requires two non-empty samples")

    pooled = list(sample_a) + list(sample_b)
    ranks = _midranks(pooled)
    rank_sum_a = sum(ranks[:n_a])
    u_a = rank_sum_a - n_a * (n_a + 1) / 2.0

    if min(n_a, n_b) <= _EXACT_MIN_SIZE:
        scaled = [int(round(2 * r)) for r in ranks]
        p = _exact_two_sided_p(scaled, n_a, int(round(2 * u_a)))
        return u_a, p

    n = n_a + n_b
    tie_sizes: dict[float, int] = defaultdict(int)
    for value in pooled:
        tie_sizes[value] += 1
    tie_term = sum(t**3 - t for t in tie_sizes.values())
    variance = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0:
        return u_a, 1.0
    deviation = abs(u_a - n_a * n_b / 2.0) - 0.5
    z = max(0.0, deviation) / math.sqrt(variance)
    return u_a, min(1.0, math.erfc(z / math.sqrt(2.0)))


def daily_series(records: Sequence[DailyServiceRecord]) -> list[DailySeriesPoint]:
    """Per-calendar-day pooled totals and daily (unweighted) ratios, date order."""
    requested: dict[Date, float] = defaultdict(float)
    shipped: dict[Date, float] = defaultdict(float)
    served: dict[Date, float] = defaultdict(float)
    for r in records:
        requested[r.date] += r.requested
        shipped[r.date] += r.shipped
        served[r.date] += min(r.shipped, r.requested)
    points = []
    for day in sorted(requested):
        req = requested[day]
        points.append(
            DailySeriesPoint(
                date=day,
                requested=req,
                shipped=shipped[day],
                ship_order_ratio=shipped[day] / req if req > 0 else None,
                same_day_coverage=served[day] / req if req > 0 else None,
            )
        )
    return points


def kpi_report(records: Sequence[DailyServiceRecord]) -> KpiReport:
    """All pooled metrics over one record set."""
    if not records:
        raise ValueError("kpi_report undefined on an empty record set")
    order_over, ship_over, full, avg_unserved = compliance_shares(records)
    return KpiReport(
        ship_order_ratio=ship_order_ratio(records),
        same_day_coverage=same_day_coverage(records),
        avg_daily_unserved=avg_unserved,
        share_order_over_limit=order_over,
        share_ship_over_limit=ship_over,
        share_full_fulfillment=full,
        n_days=len({r.date for r in records}),
        n_store_days=len(records),
    )


def _pct_change(before: float, after: float) -> float | None:
    if before == 0:
        return None
    return (after - before) / before * 100.0


def before_after(
    records: Sequence[DailyServiceRecord], cutoff_date: Date
) -> BeforeAfterComparison:
    """Split records at the cutoff (strictly before vs on-or-after) and compare.

    Ratio and share metrics get percentage-point deltas; the over-limit shares
    and the unserved batch get percent changes. The rank test compares the two
    periods' daily coverage values with the after period as sample A.
    """
    before_records = [r for r in records if r.date < cutoff_date]
    after_records = [r for r in records if r.date >= cutoff_date]
    if not before_records or not after_records:
        raise ValueError(
            f"cutoff {cutoff_date.isoformat()} leaves an empty side: "
            f"{len(before_records)} before, {len(after_records)} after"
        )
    rb = kpi_report(before_records)
    ra = kpi_report(after_records)
    deltas: dict[str, float | None] = {
        "ship_order_ratio_pp": (ra.ship_order_ratio - rb.ship_order_ratio) * 100.0,
        "same_day_coverage_pp": (ra.same_day_coverage - rb.same_day_coverage) * 100.0,
        "share_full_fulfillment_pp": (
            ra.share_full_fulfillment - rb.share_full_fulfillment
        )
        * 100.0,
        "share_order_over_limit_pct_change": _pct_change(
            rb.share_order_over_limit, ra.share_order_over_limit
        ),
        "share_ship_over_limit_pct_change": _pct_change(
            rb.share_ship_over_limit, ra.share_ship_over_limit
        ),
        "avg_daily_unserved_pct_change": _pct_change(
            rb.avg_daily_unserved, ra.avg_daily_unserved
        ),
    }
    coverage_before = [
        p.same_day_coverage
        for p in daily_series(before_records)
        if p.same_day_coverage is not None
    ]
    coverage_after = [
        p.same_day_coverage
        for p in daily_series(after_records)
        if p.same_day_coverage is not None
    ]
    u, p_value = mann_whitney_u(coverage_after, coverage_before)
    return BeforeAfterComparison(
        before=rb, after=ra, deltas=deltas, mannwhitney_u=u, p_value_two_sided=p_value
    )


def records_from_allocation(
    instance: Instance,
    result: AllocationResult,
    residuals: ResidualCapacityMap,
    day: Date,
) -> list[DailyServiceRecord]:
    """One store-day record per store: requested demand vs allocated load.

    Requested aggregates the whole pool (an order blocked by eligibility or an
    inactive warehouse was still demanded); shipped is the accepted load; the
    limit is the store's residual capacity going into the run.
    """
    requested: dict[str, float] = {s: 0.0 for s in instance.stores}
    for order in instance.orders:
        requested[order.store_id] += order.volume
    return [
        DailyServiceRecord(
            date=day,
            store_id=store_id,
            requested=requested[store_id],
            shipped=float(result.store_loads.get(store_id, 0.0)),
            store_limit=float(residuals[store_id]),
        )
        for store_id in sorted(instance.stores)
    ]
