"""JSON-over-HTTP run service for the planner console and scripts.

One instance is loaded per session (re-uploads deduplicate by content hash);
runs execute asynchronously on a small worker pool and are polled by id. All
payload field names match the file formats in :mod:`allocdss.persistence`,
and results returned over the wire are exactly what a direct library call
produces: the service never recomputes or reshapes engine output.
"""

from __future__ import annotations

import tempfile
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from datetime import date as Date
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import PlainTextResponse

from .engine import allocate_timed, simulate_next_day
from .kpi import kpi_report, records_from_allocation
from .model import (
    Instance,
    PlanConfig,
    residual_capacities,
    validate_plan,
)
from .persistence import (
    RunRecord,
    RunStore,
    export_dispatch_files,
    instance_from_doc,
    instance_hash,
    kpi_to_doc,
    plan_from_doc,
    result_to_doc,
)

#: Role label per precedence rank; ranks beyond the named ones get a generic label.
ROLE_LABELS = {1: "Warehouse-Primary", 2: "Warehouse-Auxiliary", 3: "Warehouse-InnerProducts"}

#: Calendar day assigned to planning day 1 in KPI records (deterministic, arbitrary).
_EPOCH = Date(2026, 1, 5)


def role_label(rank: int) -> str:
    return ROLE_LABELS.get(rank, f"Warehouse-Rank{rank}")


def _validation_error(violations: list[str]) -> HTTPException:
    errors = []
    for v in violations:
        field, _, message = v.partition(": ")
        errors.append({"field": field, "message": message or v})
    return HTTPException(status_code=422, detail={"message": "invalid plan", "errors": errors})


def create_app(preloaded: Instance | None = None) -> FastAPI:
    """Build the service; ``preloaded`` seeds the session instance for demos."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        app.state.executor.shutdown(wait=True, cancel_futures=True)

    app = FastAPI(title="allocdss", lifespan=lifespan)
    app.state.instances = {}  # content hash -> Instance
    app.state.session_hash = None  # hash of the currently loaded instance
    app.state.runs = RunStore()
    app.state.executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix="allocdss-run")

    if preloaded is not None:
        digest = instance_hash(preloaded)
        app.state.instances[digest] = preloaded
        app.state.session_hash = digest

    def current_instance() -> tuple[str, Instance]:
        digest = app.state.session_hash
        if digest is None:
            raise HTTPException(status_code=409, detail="no instance loaded in this session")
        return digest, app.state.instances[digest]

    def run_or_404(run_id: str) -> RunRecord:
        try:
            return app.state.runs.get(run_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}") from None

    def execute_run(run_id: str, instance: Instance, plan: PlanConfig, second_day: bool) -> None:
        runs: RunStore = app.state.runs
        runs.update(run_id, state="running")
        try:
            residuals = residual_capacities(instance)
            result, timings = allocate_timed(instance, plan, residuals)
            day = _EPOCH + timedelta(days=instance.planning_day - 1)
            kpi = kpi_report(records_from_allocation(instance, result, residuals, day))
            day2 = simulate_next_day(instance, plan, result) if second_day else None
            runs.update(
                run_id,
                state="done",
                day1_result=result,
                day2_result=day2,
                kpi=kpi,
                timings={k: float(v) for k, v in timings.items()},
            )
        except Exception as exc:  # noqa: BLE001 - failure state carries the message
            runs.update(run_id, state="failed", error=f"{type(exc).__name__}: {exc}")

    @app.post("/instance")
    async def upload_instance(request: Request):
        doc = await request.json()
        try:
            instance = instance_from_doc(doc, source="uploaded instance")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        digest = instance_hash(instance)
        app.state.instances.setdefault(digest, instance)
        app.state.session_hash = digest
        return {
            "instance_hash": digest,
            "n_orders": len(instance.orders),
            "n_stores": len(instance.stores),
            "n_warehouses": len(instance.warehouses),
            "planning_day": instance.planning_day,
        }

    @app.get("/warehouses")
    def list_warehouses():
        digest, instance = current_instance()
        descriptors = [
            {
                "id": w.id,
                "active": w.active,
                "rank": w.rank,
                "role_label": role_label(w.rank),
            }
            for w in sorted(instance.warehouses.values(), key=lambda w: (w.rank, w.id))
        ]
        return {"instance_hash": digest, "warehouses": descriptors}

    @app.post("/runs")
    async def submit_run(request: Request):
        payload = await request.json()
        digest = payload.get("instance_hash")
        if digest is None:
            digest, instance = current_instance()
        else:
            instance = app.state.instances.get(digest)
            if instance is None:
                raise HTTPException(status_code=404, detail=f"unknown instance hash {digest!r}")
        plan_doc = payload.get("plan")
        if plan_doc is None:
            raise HTTPException(status_code=422, detail="missing required field 'plan'")
        try:
            plan = plan_from_doc(plan_doc, source="plan")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        violations = validate_plan(plan, instance)
        if violations:
            raise _validation_error(violations)

        run_id = uuid.uuid4().hex
        record = RunRecord(
            run_id=run_id,
            created_at=datetime.now(timezone.utc).isoformat(),
            state="pending",
            plan=plan,
            instance_hash=digest,
            simulate_second_day=bool(payload.get("simulate_second_day", False)),
        )
        app.state.runs.add(record)
        app.state.executor.submit(
            execute_run, run_id, instance, plan, record.simulate_second_day
        )
        return {"run_id": run_id, "state": "pending"}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = run_or_404(run_id)
        return {
            "run_id": record.run_id,
            "state": record.state,
            "timings": record.timings,
            "error": record.error,
        }

    @app.get("/runs/{run_id}/result")
    def get_result(run_id: str):
        record = run_or_404(run_id)
        if record.state != "done":
            raise HTTPException(
                status_code=409, detail=f"run {run_id!r} is {record.state}, not done"
            )
        return {
            "run_id": record.run_id,
            "instance_hash": record.instance_hash,
            "result": result_to_doc(record.day1_result),
            "kpi": kpi_to_doc(record.kpi),
            "accepted_count": len(record.day1_result.accepted),
            "rejected_count": len(record.day1_result.rejections),
        }

    @app.get("/runs/{run_id}/day2")
    def get_day2(run_id: str):
        record = run_or_404(run_id)
        if record.state != "done":
            raise HTTPException(
                status_code=409, detail=f"run {run_id!r} is {record.state}, not done"
            )
        if record.day2_result is None:
            instance = app.state.instances[record.instance_hash]
            day2 = simulate_next_day(instance, record.plan, record.day1_result)
            record = app.state.runs.update(run_id, day2_result=day2)
        return {"run_id": record.run_id, "result": result_to_doc(record.day2_result)}

    @app.get("/runs/{run_id}/exports/{warehouse_id}")
    def get_export(run_id: str, warehouse_id: str):
        record = run_or_404(run_id)
        if record.state != "done":
            raise HTTPException(
                status_code=409, detail=f"run {run_id!r} is {record.state}, not done"
            )
        instance = app.state.instances[record.instance_hash]
        with tempfile.TemporaryDirectory() as tmp:
            paths = export_dispatch_files(record.day1_result, instance, record.plan, tmp)
            wanted = Path(tmp) / f"dispatch_{warehouse_id}.csv"
            if wanted not in paths:
                raise HTTPException(
                    status_code=404,
                    detail=f"no export for warehouse {warehouse_id!r} in run {run_id!r}",
                )
            text = wanted.read_text(encoding="utf-8")
        return PlainTextResponse(text, media_type="text/csv")

    return app
