"""Command-line front end: power-trace, ber, and tracer-log runs."""

from __future__ import annotations

import argparse
import json
import sys

from .scenario import (
    emit_csv,
    emit_json,
    load_scenario,
    run_ber,
    run_power_trace,
    run_tracer_log,
)

_EXPERIMENT_BY_COMMAND = {
    "power-trace": "power_trace",
    "ber": "ber",
    "tracer-log": "tracer_log",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwdiv",
        description=(
            "Link-level simulator for 60 GHz spatial diversity: equal-gain "
            "versus strongest-path beam switching under human blockage."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "power-trace": "received power of each scheme over time",
        "ber": "uncoded SC-FDE bit-error-rate curves",
        "tracer-log": "shadowing-tracer action log and statistics",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="scenario configuration file (JSON)")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        sc = load_scenario(
            args.config,
            experiment=_EXPERIMENT_BY_COMMAND[args.command],
            seed_override=args.seed,
        )
        if args.command == "power-trace":
            records = run_power_trace(sc)
        elif args.command == "ber":
            records = run_ber(sc)
        else:
            records, stats = run_tracer_log(sc)
            print(json.dumps(stats, indent=2), file=sys.stderr)
        with open(args.out, "w", newline="") as fh:
            if args.format == "csv":
                emit_csv(records, fh)
            else:
                emit_json(records, fh)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
