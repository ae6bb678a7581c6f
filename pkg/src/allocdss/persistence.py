"""File formats and the in-memory run registry.

Structured documents (instances, plans, results, generator specs, KPI
comparisons) are JSON with a mandatory versioned ``schema`` tag such as
``allocdss.instance/1``; an unsupported major version is a hard error,
unknown fields inside a supported version only warn. Canonical serialization
sorts every collection and key, uses two-space indentation, UTF-8, LF line
endings and a trailing newline, so saving is idempotent and content hashes
are stable under input reordering.

Tabular data (daily service records, per-warehouse dispatch exports) is
comma-separated text with a header row, UTF-8, LF, '.' decimal separator.
Floats are written with repr (shortest round-trip form), which golden tests
rely on byte-for-byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import threading
import warnings
from dataclasses import dataclass, field, fields as dataclass_fields
from datetime import date as Date
from pathlib import Path
from typing import Any, Mapping, Sequence

from .generator import GeneratorSpec, VolumeDistribution
from .kpi import BeforeAfterComparison, DailySeriesPoint, KpiReport
from .model import (
    AllocationResult,
    Category,
    DailyServiceRecord,
    Instance,
    Order,
    PlanConfig,
    RejectionReason,
    Route,
    Store,
    Warehouse,
    effective_plan,
    validate_instance,
)

__all__ = [
    "INSTANCE_SCHEMA",
    "PLAN_SCHEMA",
    "RESULT_SCHEMA",
    "GENSPEC_SCHEMA",
    "KPI_SCHEMA",
    "canonical_json",
    "instance_to_doc",
    "instance_from_doc",
    "instance_hash",
    "save_instance",
    "load_instance",
    "plan_to_doc",
    "plan_from_doc",
    "save_plan",
    "load_plan",
    "result_to_doc",
    "result_from_doc",
    "save_result",
    "load_result",
    "genspec_to_doc",
    "genspec_from_doc",
    "save_genspec",
    "load_genspec",
    "kpi_to_doc",
    "comparison_to_doc",
    "save_comparison",
    "save_daily_records",
    "load_daily_records",
    "save_daily_series",
    "export_dispatch_files",
    "RunRecord",
    "RunStore",
]

INSTANCE_SCHEMA = "allocdss.instance/1"
PLAN_SCHEMA = "allocdss.plan/1"
RESULT_SCHEMA = "allocdss.result/1"
GENSPEC_SCHEMA = "allocdss.genspec/1"
KPI_SCHEMA = "allocdss.kpi/1"


def canonical_json(doc: Mapping[str, Any]) -> str:
    """Deterministic text form: sorted keys, 2-space indent, trailing newline."""
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _read_json(path: str | Path, expected_schema: str) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: top level must be an object")
    _check_schema(doc, expected_schema, str(path))
    return doc


def _check_schema(doc: Mapping[str, Any], expected: str, context: str) -> None:
    tag = doc.get("schema")
    if tag is None:
        raise ValueError(f"{context}: missing required 'schema' field (expected {expected})")
    name, _, major = str(tag).rpartition("/")
    want_name, _, want_major = expected.rpartition("/")
    if name != want_name:
        raise ValueError(f"{context}: schema {tag!r} is not a {want_name!r} document")
    if major != want_major:
        raise ValueError(
            f"{context}: unsupported {want_name} major version {major!r} "
            f"(this build reads version {want_major})"
        )


def _take(obj: Mapping[str, Any], known: Sequence[str], context: str) -> dict[str, Any]:
    """Copy known fields; warn about (and drop) unknown ones."""
    extra = sorted(set(obj) - set(known))
    if extra:
        warnings.warn(f"{context}: ignoring unknown fields {extra}", stacklevel=3)
    return {k: obj[k] for k in known if k in obj}


def _need(obj: Mapping[str, Any], key: str, context: str) -> Any:
    if key not in obj:
        raise ValueError(f"{context}: missing required field {key!r}")
    return obj[key]


# --- instance -------------------------------------------------------------


def instance_to_doc(instance: Instance) -> dict[str, Any]:
    return {
        "schema": INSTANCE_SCHEMA,
        "planning_day": instance.planning_day,
        "orders": [
            {
                "id": o.id,
                "store_id": o.store_id,
                "warehouse_id": o.warehouse_id,
                "category_id": o.category_id,
                "volume": o.volume,
                "priority": o.priority,
            }
            for o in sorted(instance.orders, key=lambda o: o.id)
        ],
        "stores": [
            {
                "id": s.id,
                "route_id": s.route_id,
                "base_capacity": s.base_capacity,
                "flow_through_deduction": s.flow_through_deduction,
                "eligibility": {c: int(v) for c, v in sorted(s.eligibility.items())},
            }
            for _, s in sorted(instance.stores.items())
        ],
        "routes": [{"id": r.id} for _, r in sorted(instance.routes.items())],
        "categories": [
            {"id": c.id, "constrained": c.constrained, "route_limit": c.route_limit}
            for _, c in sorted(instance.categories.items())
        ],
        "warehouses": [
            {"id": w.id, "active": w.active, "rank": w.rank}
            for _, w in sorted(instance.warehouses.items())
        ],
    }


def instance_from_doc(doc: Mapping[str, Any], source: str = "instance") -> Instance:
    body = _take(
        doc,
        ["schema", "planning_day", "orders", "stores", "routes", "categories", "warehouses"],
        source,
    )
    orders = tuple(
        Order(
            id=str(_need(o, "id", f"{source}: order")),
            store_id=str(_need(o, "store_id", f"{source}: order {o.get('id')}")),
            warehouse_id=str(_need(o, "warehouse_id", f"{source}: order {o.get('id')}")),
            category_id=str(_need(o, "category_id", f"{source}: order {o.get('id')}")),
            volume=float(_need(o, "volume", f"{source}: order {o.get('id')}")),
            priority=float(_need(o, "priority", f"{source}: order {o.get('id')}")),
        )
        for o in _need(body, "orders", source)
    )
    stores = {}
    for s in _need(body, "stores", source):
        sid = str(_need(s, "id", f"{source}: store"))
        stores[sid] = Store(
            id=sid,
            route_id=str(_need(s, "route_id", f"{source}: store {sid}")),
            base_capacity=float(_need(s, "base_capacity", f"{source}: store {sid}")),
            flow_through_deduction=float(
                _need(s, "flow_through_deduction", f"{source}: store {sid}")
            ),
            eligibility={
                str(c): int(v)
                for c, v in _need(s, "eligibility", f"{source}: store {sid}").items()
            },
        )
    routes = {
        str(_need(r, "id", f"{source}: route")): Route(id=str(r["id"]))
        for r in _need(body, "routes", source)
    }
    categories = {}
    for c in _need(body, "categories", source):
        cid = str(_need(c, "id", f"{source}: category"))
        limit = c.get("route_limit")
        categories[cid] = Category(
            id=cid,
            constrained=bool(c.get("constrained", False)),
            route_limit=None if limit is None else float(limit),
        )
    warehouses = {}
    for w in _need(body, "warehouses", source):
        wid = str(_need(w, "id", f"{source}: warehouse"))
        warehouses[wid] = Warehouse(
            id=wid, active=bool(w.get("active", True)), rank=int(w.get("rank", 1))
        )
    instance = Instance(
        orders=orders,
        stores=stores,
        routes=routes,
        categories=categories,
        warehouses=warehouses,
        planning_day=int(body.get("planning_day", 1)),
    )
    violations = validate_instance(instance)
    if violations:
        raise ValueError(f"{source}: invalid instance: " + "; ".join(violations))
    return instance


def instance_hash(instance: Instance) -> str:
    """Content hash (sha256 hex) of the canonical serialization."""
    text = canonical_json(instance_to_doc(instance))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def save_instance(instance: Instance, path: str | Path) -> Path:
    return _write_text(path, canonical_json(instance_to_doc(instance)))


def load_instance(path: str | Path) -> Instance:
    return instance_from_doc(_read_json(path, INSTANCE_SCHEMA), source=str(path))


# --- plan -----------------------------------------------------------------


def plan_to_doc(plan: PlanConfig) -> dict[str, Any]:
    return {
        "schema": PLAN_SCHEMA,
        "activations": {w: bool(v) for w, v in sorted(plan.activations.items())},
        "ranks": {w: int(r) for w, r in sorted(plan.ranks.items())},
    }


def plan_from_doc(doc: Mapping[str, Any], source: str = "plan") -> PlanConfig:
    body = _take(doc, ["schema", "activations", "ranks"], source)
    return PlanConfig(
        activations={str(w): bool(v) for w, v in _need(body, "activations", source).items()},
        ranks={str(w): int(r) for w, r in _need(body, "ranks", source).items()},
    )


def save_plan(plan: PlanConfig, path: str | Path) -> Path:
    return _write_text(path, canonical_json(plan_to_doc(plan)))


def load_plan(path: str | Path) -> PlanConfig:
    return plan_from_doc(_read_json(path, PLAN_SCHEMA), source=str(path))


# --- allocation result ----------------------------------------------------


def result_to_doc(result: AllocationResult) -> dict[str, Any]:
    return {
        "schema": RESULT_SCHEMA,
        "accepted": list(result.accepted),  # acceptance sequence is semantic
        "store_loads": {s: v for s, v in sorted(result.store_loads.items())},
        "category_loads": [
            {"route_id": r, "category_id": c, "volume": v}
            for (r, c), v in sorted(result.category_loads.items())
        ],
        "rejections": {
            oid: reason.value for oid, reason in sorted(result.rejections.items())
        },
        "objective_value": result.objective_value,
    }


def result_from_doc(doc: Mapping[str, Any], source: str = "result") -> AllocationResult:
    body = _take(
        doc,
        ["schema", "accepted", "store_loads", "category_loads", "rejections", "objective_value"],
        source,
    )
    return AllocationResult(
        accepted=tuple(str(o) for o in _need(body, "accepted", source)),
        store_loads={
            str(s): float(v) for s, v in _need(body, "store_loads", source).items()
        },
        category_loads={
            (str(e["route_id"]), str(e["category_id"])): float(e["volume"])
            for e in _need(body, "category_loads", source)
        },
        rejections={
            str(o): RejectionReason(r)
            for o, r in _need(body, "rejections", source).items()
        },
        objective_value=float(_need(body, "objective_value", source)),
    )


def save_result(result: AllocationResult, path: str | Path) -> Path:
    return _write_text(path, canonical_json(result_to_doc(result)))


def load_result(path: str | Path) -> AllocationResult:
    return result_from_doc(_read_json(path, RESULT_SCHEMA), source=str(path))


# --- generator spec -------------------------------------------------------


def genspec_to_doc(spec: GeneratorSpec) -> dict[str, Any]:
    doc: dict[str, Any] = {"schema": GENSPEC_SCHEMA}
    for f in dataclass_fields(spec):
        value = getattr(spec, f.name)
        if isinstance(value, VolumeDistribution):
            value = {
                d.name: getattr(value, d.name) for d in dataclass_fields(value)
            }
        doc[f.name] = value
    return doc


def genspec_from_doc(doc: Mapping[str, Any], source: str = "genspec") -> GeneratorSpec:
    known = ["schema"] + [f.name for f in dataclass_fields(GeneratorSpec)]
    body = _take(doc, known, source)
    kwargs = {k: v for k, v in body.items() if k not in ("schema", "volume_distribution")}
    dist_doc = body.get("volume_distribution")
    if dist_doc is not None:
        dist_body = _take(
            dist_doc,
            [f.name for f in dataclass_fields(VolumeDistribution)],
            f"{source}: volume_distribution",
        )
        kwargs["volume_distribution"] = VolumeDistribution(**dist_body)
    if "seed" not in kwargs:
        raise ValueError(f"{source}: missing required field 'seed'")
    try:
        spec = GeneratorSpec(**kwargs)
    except TypeError as exc:
        raise ValueError(f"{source}: {exc}") from exc
    problems = spec.check()
    if problems:
        raise ValueError(f"{source}: invalid generator spec: " + "; ".join(problems))
    return spec


def save_genspec(spec: GeneratorSpec, path: str | Path) -> Path:
    return _write_text(path, canonical_json(genspec_to_doc(spec)))


def load_genspec(path: str | Path) -> GeneratorSpec:
    return genspec_from_doc(_read_json(path, GENSPEC_SCHEMA), source=str(path))


# --- KPI documents --------------------------------------------------------


def kpi_to_doc(report: KpiReport) -> dict[str, Any]:
    return {f.name: getattr(report, f.name) for f in dataclass_fields(report)}


def comparison_to_doc(comparison: BeforeAfterComparison) -> dict[str, Any]:
    return {
        "schema": KPI_SCHEMA,
        "before": kpi_to_doc(comparison.before),
        "after": kpi_to_doc(comparison.after),
        "deltas": dict(sorted(comparison.deltas.items())),
        "mannwhitney_u": comparison.mannwhitney_u,
        "p_value_two_sided": comparison.p_value_two_sided,
    }


def save_comparison(comparison: BeforeAfterComparison, path: str | Path) -> Path:
    return _write_text(path, canonical_json(comparison_to_doc(comparison)))


# --- daily service records (tabular) ---------------------------------------

_DAILY_HEADER = ["date", "store_id", "requested", "shipped", "store_limit"]


def save_daily_records(records: Sequence[DailyServiceRecord], path: str | Path) -> Path:
    lines = [",".join(_DAILY_HEADER)]
    for r in records:
        lines.append(
            f"{r.date.isoformat()},{r.store_id},{r.requested!r},{r.shipped!r},{r.store_limit!r}"
        )
    return _write_text(path, "\n".join(lines) + "\n")


def load_daily_records(path: str | Path) -> list[DailyServiceRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows or rows[0] != _DAILY_HEADER:
        raise ValueError(
            f"{path}: row 1: expected header {','.join(_DAILY_HEADER)!r}"
        )
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(_DAILY_HEADER):
            raise ValueError(f"{path}: row {lineno}: expected 5 columns, got {len(row)}")
        try:
            day = Date.fromisoformat(row[0])
            requested, shipped, limit = (float(row[i]) for i in (2, 3, 4))
        except ValueError as exc:
            raise ValueError(f"{path}: row {lineno}: {exc}") from exc
        if min(requested, shipped, limit) < 0:
            raise ValueError(f"{path}: row {lineno}: negative values are not allowed")
        records.append(
            DailyServiceRecord(
                date=day,
                store_id=row[1],
                requested=requested,
                shipped=shipped,
                store_limit=limit,
            )
        )
    return records


def save_daily_series(points: Sequence[DailySeriesPoint], path: str | Path) -> Path:
    """Column-oriented per-day series for external plotting tools."""
    lines = ["date,requested,shipped,ship_order_ratio,same_day_coverage"]
    for p in points:
        ratio = "" if p.ship_order_ratio is None else repr(p.ship_order_ratio)
        cov = "" if p.same_day_coverage is None else repr(p.same_day_coverage)
        lines.append(f"{p.date.isoformat()},{p.requested!r},{p.shipped!r},{ratio},{cov}")
    return _write_text(path, "\n".join(lines) + "\n")


# --- dispatch exports -------------------------------------------------------


def export_dispatch_files(
    result: AllocationResult,
    instance: Instance,
    plan: PlanConfig | None,
    out_dir: str | Path,
) -> list[Path]:
    """One tabular file per active warehouse with its accepted orders in sequence.

    Active warehouses with nothing accepted still get a header plus zero-total
    footer. An accepted order from a deactivated warehouse means the result
    does not belong to this plan and is an input error.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    active, _ = effective_plan(instance, plan)
    by_id = {o.id: o for o in instance.orders}

    rows: dict[str, list[str]] = {w: [] for w, on in active.items() if on}
    totals: dict[str, float] = {w: 0.0 for w in rows}
    for oid in result.accepted:
        order = by_id[oid]
        if order.warehouse_id not in rows:
            raise ValueError(
                f"accepted order {oid!r} comes from deactivated warehouse "
                f"{order.warehouse_id!r}"
            )
        bucket = rows[order.warehouse_id]
        store = instance.stores[order.store_id]
        bucket.append(
            f"{len(bucket) + 1},{order.id},{order.store_id},"
            f"{store.route_id},{order.category_id},{order.volume!r}"
        )
        totals[order.warehouse_id] += order.volume

    paths = []
    for wid in sorted(rows):
        lines = ["sequence,order_id,store_id,route_id,category_id,volume"]
        lines.extend(rows[wid])
        lines.append(f"TOTAL,,,,,{totals[wid]!r}")
        paths.append(_write_text(out_dir / f"dispatch_{wid}.csv", "\n".join(lines) + "\n"))
    return paths


# --- run store --------------------------------------------------------------


@dataclass
class RunRecord:
    """Lifecycle state of one allocation run held by the service."""

    run_id: str
    created_at: str  # ISO timestamp; never part of any content hash
    state: str  # pending | running | done | failed
    plan: PlanConfig
    instance_hash: str
    simulate_second_day: bool = False
    timings: dict[str, float] = field(default_factory=dict)
    error: str | None = None
    day1_result: AllocationResult | None = None
    day2_result: AllocationResult | None = None
    kpi: KpiReport | None = None


class RunStore:
    """Access-serialized in-memory registry of runs; the service's only shared state."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._runs: dict[str, RunRecord] = {}

    def add(self, record: RunRecord) -> None:
        with self._lock:
            if record.run_id in self._runs:
                raise ValueError(f"duplicate run id {record.run_id!r}")
            self._runs[record.run_id] = record

    def get(self, run_id: str) -> RunRecord:
        with self._lock:
            if run_id not in self._runs:
                raise KeyError(run_id)
            return self._runs[run_id]

    def update(self, run_id: str, **changes: Any) -> RunRecord:
        with self._lock:
            record = self._runs[run_id]
            for key, value in changes.items():
                setattr(record, key, value)
            return record

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._runs)
