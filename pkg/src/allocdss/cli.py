"""Batch command-line interface.

Subcommands cover the full workflow: ``generate`` (synthetic instances),
``allocate`` (run the heuristic and write results plus dispatch exports),
``simulate`` (multi-day rolling series to a daily-records file), ``evaluate``
(before/after KPI comparison), ``bench`` (scaling, gap, and kernel-backend
benchmarks), and ``serve`` (the HTTP service).

Exit codes are a stable scripting contract: 0 success, 1 input or validation
error, 2 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import date as Date
from pathlib import Path

from . import bench as bench_mod
from ._kernels import DEFAULT_BACKEND, available_backends
from .engine import allocate_timed, check_feasibility, simulate_next_day
from .generator import generate, generate_daily_series
from .kpi import before_after, daily_series
from .model import PlanConfig, residual_capacities, validate_plan
from .persistence import (
    comparison_to_doc,
    export_dispatch_files,
    load_daily_records,
    load_genspec,
    load_instance,
    load_plan,
    result_to_doc,
    save_comparison,
    save_daily_records,
    save_daily_series,
    save_instance,
    save_result,
)
from .service import create_app
from .simulation import rolling_records

_DEFAULT_ADDR = "127.0.0.1:8000"
_DEFAULT_SIZES = "16384,32768,65536,131072,262144"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract reserves 2 for bugs."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(args: argparse.Namespace, doc: dict, table_lines: list[str]) -> None:
    if args.format == "records":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in table_lines:
            print(line)


def cmd_generate(args: argparse.Namespace) -> int:
    spec = load_genspec(args.spec)
    instance = generate(spec)
    out = save_instance(instance, args.out)
    _emit(
        args,
        {
            "out": str(out),
            "n_orders": len(instance.orders),
            "n_stores": len(instance.stores),
            "n_warehouses": len(instance.warehouses),
        },
        [
            f"wrote {out}: {len(instance.orders)} orders, "
            f"{len(instance.stores)} stores, {len(instance.warehouses)} warehouses"
        ],
    )
    return 0


def cmd_allocate(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    plan = load_plan(args.plan) if args.plan else PlanConfig.from_instance(instance)
    violations = validate_plan(plan, instance)
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return 1

    residuals = residual_capacities(instance)
    result, timings = allocate_timed(instance, plan, residuals, backend=args.backend)
    feasibility = check_feasibility(instance, plan, residuals, result)
    if feasibility:
        for v in feasibility:
            print(f"INTERNAL: {v}", file=sys.stderr)
        print("feasibility self-check: FAIL", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [save_result(result, out_dir / "result.json")]
    written.extend(export_dispatch_files(result, instance, plan, out_dir))
    day2_doc = None
    if args.second_day:
        day2 = simulate_next_day(instance, plan, result, backend=args.backend)
        written.append(save_result(day2, out_dir / "day2_result.json"))
        day2_doc = result_to_doc(day2)

    total = sum(timings.values())
    timing_line = (
        "timings: "
        + " ".join(f"{phase}={timings[phase]:.4f}s" for phase in ("filter", "sort", "allocate"))
        + f" total={total:.4f}s"
    )
    table = [
        f"orders: {len(instance.orders)} accepted: {len(result.accepted)} "
        f"rejected: {len(result.rejections)}",
        f"objective: {result.objective_value}",
        "feasibility self-check: PASS",
        timing_line,
    ] + [f"wrote {p}" for p in written]
    doc = {
        "result": result_to_doc(result),
        "day2_result": day2_doc,
        "feasible": True,
        "timings": timings,
        "written": [str(p) for p in written],
    }
    _emit(args, doc, table)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    spec = load_genspec(args.spec)
    days = generate_daily_series(spec, args.days, args.volatility)
    plan = PlanConfig.from_instance(days[0])
    records = rolling_records(days, plan, Date.fromisoformat(args.start_date))
    out = save_daily_records(records, args.out)
    _emit(
        args,
        {"out": str(out), "n_days": args.days, "n_records": len(records)},
        [f"wrote {out}: {len(records)} store-day records over {args.days} days"],
    )
    return 0


def _fmt_delta(value: float | None, suffix: str) -> str:
    if value is None:
        return "n/a"
    return f"{value:+.2f} {suffix}"


def cmd_evaluate(args: argparse.Namespace) -> int:
    records = load_daily_records(args.records)
    comparison = before_after(records, Date.fromisoformat(args.cutoff))
    doc = comparison_to_doc(comparison)
    if args.out:
        save_comparison(comparison, args.out)
    if args.series_out:
        save_daily_series(daily_series(records), args.series_out)

    rows = [
        ("ship_order_ratio", "ship_order_ratio_pp", "pp"),
        ("same_day_coverage", "same_day_coverage_pp", "pp"),
        ("avg_daily_unserved", "avg_daily_unserved_pct_change", "%"),
        ("share_order_over_limit", "share_order_over_limit_pct_change", "%"),
        ("share_ship_over_limit", "share_ship_over_limit_pct_change", "%"),
        ("share_full_fulfillment", "share_full_fulfillment_pp", "pp"),
    ]
    table = [f"{'metric':<26} {'before':>12} {'after':>12}  delta"]
    for metric, delta_key, suffix in rows:
        b = getattr(comparison.before, metric)
        a = getattr(comparison.after, metric)
        table.append(
            f"{metric:<26} {b:>12.4f} {a:>12.4f}  "
            f"{_fmt_delta(comparison.deltas[delta_key], suffix)}"
        )
    table.append(
        f"mann-whitney U={comparison.mannwhitney_u:.1f} "
        f"two-sided p={comparison.p_value_two_sided:.3g}"
    )
    if args.out:
        table.append(f"wrote {args.out}")
    if args.series_out:
        table.append(f"wrote {args.series_out}")
    _emit(args, doc, table)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.mode == "scaling":
        sizes = [int(s) for s in args.sizes.split(",") if s]
        points = bench_mod.run_scaling(sizes, repeats=args.repeats, backend=args.backend)
        ratios = bench_mod.doubling_ratios(points)
        table = [f"backend: {args.backend or DEFAULT_BACKEND}", f"{'N':>10} {'median_ms':>12} ratio"]
        for i, p in enumerate(points):
            ratio = f"{ratios[i - 1]:.2f}" if i > 0 else "-"
            table.append(f"{p.n_orders:>10} {p.median_seconds * 1e3:>12.2f} {ratio}")
        doc = {
            "mode": "scaling",
            "backend": args.backend or DEFAULT_BACKEND,
            "points": [
                {"n_orders": p.n_orders, "median_seconds": p.median_seconds, **p.phase_seconds}
                for p in points
            ],
            "doubling_ratios": ratios,
        }
    elif args.mode == "gap":
        summary = bench_mod.run_gap(
            args.instances, n_orders=args.orders, seed0=args.seed0, loose=args.loose
        )
        table = [
            f"instances: {summary.n_instances} (oracle optimal on {summary.n_optimal})",
            f"mean gap: {summary.mean_gap:.6f}",
            f"max gap:  {summary.max_gap:.6f}",
        ]
        doc = {
            "mode": "gap",
            "n_instances": summary.n_instances,
            "n_optimal": summary.n_optimal,
            "mean_gap": summary.mean_gap,
            "max_gap": summary.max_gap,
            "gaps": [r.relative_gap for r in summary.reports],
        }
    else:
        comparison = bench_mod.compare_backends(repeats=args.repeats)
        table = [f"available backends: {', '.join(available_backends())}"]
        for backend, stats in comparison.items():
            table.append(f"{backend}: median {stats['median_seconds'] * 1e3:.2f} ms")
        doc = {"mode": "backends", "results": comparison}

    if args.out:
        Path(args.out).write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        table.append(f"wrote {args.out}")
    _emit(args, doc, table)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    addr = args.addr or os.environ.get("ALLOCDSS_ADDR", _DEFAULT_ADDR)
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"--addr must look like host:port, got {addr!r}")
    preloaded = load_instance(args.instance) if args.instance else None
    app = create_app(preloaded)
    uvicorn.run(app, host=host, port=int(port_text))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allocdss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--format",
            choices=("table", "records"),
            default="table",
            help="human table (default) or machine-readable JSON",
        )

    p = sub.add_parser("generate", help="write a synthetic instance from a spec file")
    p.add_argument("--spec", required=True, help="generator spec JSON path")
    p.add_argument("--out", required=True, help="instance JSON output path")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("allocate", help="run the allocation heuristic on an instance")
    p.add_argument("--instance", required=True, help="instance JSON path")
    p.add_argument("--plan", help="plan JSON path (default: instance's own plan)")
    p.add_argument("--out-dir", default=".", help="directory for result and exports")
    p.add_argument("--second-day", action="store_true", help="also simulate day 2")
    p.add_argument("--backend", choices=("python", "compiled"), help="kernel override")
    common(p)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("simulate", help="rolling multi-day run writing daily records")
    p.add_argument("--spec", required=True, help="generator spec JSON path")
    p.add_argument("--days", type=int, default=30)
    p.add_argument("--volatility", type=float, default=0.2)
    p.add_argument("--start-date", default="2026-01-05", help="ISO date of day 1")
    p.add_argument("--out", required=True, help="daily records CSV output path")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="before/after KPI comparison from daily records")
    p.add_argument("--records", required=True, help="daily records CSV path")
    p.add_argument("--cutoff", required=True, help="go-live cutoff (ISO date)")
    p.add_argument("--out", help="comparison JSON output path")
    p.add_argument("--series-out", help="per-day series CSV output path")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="scaling, gap, or kernel-backend benchmarks")
    p.add_argument("--mode", choices=("scaling", "gap", "backends"), required=True)
    p.add_argument("--sizes", default=_DEFAULT_SIZES, help="comma-separated N values")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--instances", type=int, default=100, help="gap mode: instance count")
    p.add_argument("--orders", type=int, default=15, help="gap mode: orders per instance")
    p.add_argument("--seed0", type=int, default=1000, help="gap mode: first seed")
    p.add_argument("--loose", action="store_true", help="gap mode: loose capacities")
    p.add_argument("--backend", choices=("python", "compiled"), help="kernel override")
    p.add_argument("--out", help="JSON output path")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--addr", help=f"host:port (default {_DEFAULT_ADDR} or $ALLOCDSS_ADDR)")
    p.add_argument("--instance", help="instance JSON to preload into the session")
    p.set_defaults(func=cmd_serve, format="table")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - exit-code contract for unexpected bugs
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
