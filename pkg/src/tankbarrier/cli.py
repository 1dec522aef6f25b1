"""Command-line interface: run, serve, validate, bench."""

import argparse
import json
import os
import sys

from .bench import run_bench
from .harness import export_log, run_scenario
from .scenario import ScenarioError, load_scenario
from .scenarios import builtin_names, builtin_scenario

__all__ = ["main"]

_DEFAULT_PORT = 8765


def _load(ref):
    """Load a scenario from a file path or a builtin:NAME reference."""
    if ref.startswith("builtin:"):
        return builtin_scenario(ref[len("builtin:") :])
    return load_scenario(ref)


def _cmd_run(args):
    scenario = _load(args.scenario)
    if scenario.mode != "scripted":
        print("run requires a scripted scenario; use `serve` for live mode", file=sys.stderr)
        return 2
    records, summary = run_scenario(scenario)
    if args.out:
        fmt = args.format
        if fmt is None:
            fmt = "jsonl" if args.out.endswith((".jsonl", ".ndjson")) else "csv"
        export_log(records, fmt, args.out)
        print(f"wrote {len(records)} records to {args.out}")
    if args.summary or not args.out:
        print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_serve(args):
    import uvicorn

    from .service import create_app

    scenario = _load(args.scenario)
    app = create_app(
        scenario,
        rate_hz=args.rate_hz,
        broadcast_interval_s=args.broadcast_ms / 1e3,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_validate(args):
    try:
        scenario = _load(args.scenario)
    except ScenarioError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return 1
    print(
        f"OK: {scenario.name} ({scenario.mode}, {scenario.n_cycles} cycles at "
        f"{scenario.dt_s * 1e3:g} ms)"
    )
    return 0


def _cmd_bench(args):
    stats = run_bench(cycles=args.cycles)
    print(json.dumps(stats, indent=2, sort_keys=True))
    ok = stats["median_ms"] < stats["budget_ms"]
    print(
        f"median {stats['median_ms']:.3f} ms vs {stats['budget_ms']:.1f} ms budget: "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="tankbarrier",
        description="Passivity-preserving admittance control with barrier "
        "constraints: scripted runs, live service, validation, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scripted scenario")
    run_p.add_argument("scenario", help="scenario JSON path or builtin:NAME")
    run_p.add_argument("--out", help="log output path (.csv or .jsonl)")
    run_p.add_argument("--format", choices=["csv", "jsonl"], default=None)
    run_p.add_argument("--summary", action="store_true", help="print the run summary")
    run_p.set_defaults(func=_cmd_run)

    serve_p = sub.add_parser("serve", help="serve a live scenario over WebSocket")
    serve_p.add_argument("scenario", help="scenario JSON path or builtin:NAME")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("TANKBARRIER_PORT", _DEFAULT_PORT)),
        help="port (default: TANKBARRIER_PORT env or 8765)",
    )
    serve_p.add_argument(
        "--rate-hz",
        type=float,
        default=None,
        help="cycle rate; default is real time (1/dt), 0 means unpaced",
    )
    serve_p.add_argument(
        "--broadcast-ms", type=float, default=16.0, help="state broadcast period"
    )
    serve_p.set_defaults(func=_cmd_serve)

    val_p = sub.add_parser("validate", help="validate a scenario file")
    val_p.add_argument("scenario", help="scenario JSON path or builtin:NAME")
    val_p.set_defaults(func=_cmd_validate)

    bench_p = sub.add_parser("bench", help="controller timing benchmark")
    bench_p.add_argument("--cycles", type=int, default=2000)
    bench_p.set_defaults(func=_cmd_bench)

    parser.epilog = "bundled scenarios: " + ", ".join(
        f"builtin:{name}" for name in builtin_names()
    )
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
