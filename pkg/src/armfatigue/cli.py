"""Command line entry points.

``armfatigue simulate --scenario task.json --out trace.csv`` runs one
scenario and writes the trace CSV (optionally a JSON summary and report
figures).  ``armfatigue sweep --scenario base.json --grid grid.json --out
ranking.csv`` evaluates a task grid and writes the ranked table.

Exit codes: 0 success, 1 scenario/grid validation failure, 2 runtime
failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ParseError, SchemaError, ValidationError
from .scenario import (
    load_grid_file,
    load_scenario_file,
    run,
    scenario_from_dict,
    scenario_to_dict,
    sweep,
    write_summary_json,
    write_sweep_csv,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="armfatigue",
        description="Joint-level muscle fatigue simulator for repetitive "
        "push/pull arm tasks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one scenario and write the trace CSV")
    sim.add_argument("--scenario", required=True, help="scenario JSON file")
    sim.add_argument("--out", required=True, help="trace CSV destination")
    sim.add_argument("--summary", help="also write a JSON summary here")
    sim.add_argument(
        "--mode",
        choices=("quasistatic", "static_min_mvc"),
        help="override run.mode",
    )
    sim.add_argument("--duration-s", type=float, help="override run.duration_s")
    sim.add_argument("--dt-s", type=float, help="override run.dt_s")
    sim.add_argument("--plots", metavar="DIR", help="render report figures into DIR")

    sw = sub.add_parser("sweep", help="evaluate a task grid and write the ranked CSV")
    sw.add_argument("--scenario", required=True, help="base scenario JSON file")
    sw.add_argument("--grid", required=True, help="sweep grid JSON file")
    sw.add_argument("--out", required=True, help="ranked CSV destination")
    return parser


def _fmt_time(seconds) -> str:
    if seconds is None:
        return "none within horizon"
    return f"{seconds:.1f} s ({seconds / 60.0:.2f} min)"


def _cmd_simulate(args) -> int:
    scenario = load_scenario_file(args.scenario)
    overrides = {
        "mode": args.mode,
        "duration_s": args.duration_s,
        "dt_s": args.dt_s,
    }
    if any(v is not None for v in overrides.values()):
        data = scenario_to_dict(scenario)
        for key, value in overrides.items():
            if value is not None:
                data["run"][key] = value
        scenario = scenario_from_dict(data)

    result = run(scenario)
    write_trace_csv(result.trace, args.out)
    if args.summary:
        write_summary_json(result.summary, args.summary)
    if args.plots:
        from .plots import render_report

        for path in render_report(result.trace, args.plots):
            print(f"wrote {path}")

    print(f"wrote {args.out} ({len(result.trace)} samples, mode={scenario.run.mode})")
    for joint in ("shoulder", "elbow"):
        print(f"  {joint} risk crossing: {_fmt_time(result.summary['crossing_time_s'][joint])}")
    flags = result.summary["opposing_sign_flags"]
    if flags:
        print(f"  note: net torque opposes designated group >5% of phase: {', '.join(flags)}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = load_scenario_file(args.scenario)
    grid = load_grid_file(args.grid)
    results = sweep(base, grid)
    write_sweep_csv(results, args.out)
    ok = sum(1 for r in results if r.status == "ok")
    print(f"wrote {args.out} ({ok}/{len(results)} cells ok, objective={grid.objective})")
    if results and results[0].status == "ok":
        best = results[0]
        print(f"  best cell #{best.index}: {best.overrides}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_sweep(args)
    except (ParseError, SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
