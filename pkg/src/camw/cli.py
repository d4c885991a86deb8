"""Command line entry point: ``camw run | verify | accept``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from camw import experiments, verification


def _cmd_run(args) -> int:
    text = ""
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot read config {args.config}: {exc.strerror}", file=sys.stderr)
            return 2
    if not text.strip() and not args.preset:
        print("error: give --config and/or --preset", file=sys.stderr)
        return 2
    try:
        spec = experiments.parse_config(
            text, preset=args.preset, seed=args.seed, replications=args.replications
        )
    except experiments.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        output = experiments.run_scenarios(spec, out=args.out, trace=args.trace, write=True)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(output.summary_csv(), end="")
    return 0


def _cmd_verify(args) -> int:
    reports = verification.run_all()
    for report in reports:
        print(report.line())
        for failure in report.failures:
            print(f"    {failure}")
    return 0 if all(r.passed for r in reports) else 1


def _cmd_accept(args) -> int:
    summaries = []
    for path in args.inputs:
        try:
            summaries.extend(experiments.read_summary(path))
        except OSError as exc:
            print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
            return 2
    oracle = [] if args.skip_oracles else verification.run_all()
    try:
        verdicts = experiments.check_acceptance(summaries, oracle)
    except experiments.MissingPresetData as exc:
        print(f"error: missing preset data: {exc}", file=sys.stderr)
        return 2
    for verdict in verdicts:
        print(verdict.line())
    return 0 if all(v.passed for v in verdicts) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camw", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log every run")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario sweep and write CSV output")
    run.add_argument("--config", help="JSON scenario file")
    run.add_argument("--preset", choices=sorted(experiments.PRESETS))
    run.add_argument("--seed", type=int)
    run.add_argument("--replications", type=int)
    run.add_argument(
        "--out",
        type=Path,
        help=f"rows CSV path (default ${experiments.OUTPUT_DIR_ENV}/<name>.csv or results/<name>.csv)",
    )
    run.add_argument("--trace", action="store_true", help="also write one per-slot trace per run")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser("verify", help="closed-form estimators vs exhaustive enumeration")
    verify.set_defaults(func=_cmd_verify)

    accept = sub.add_parser("accept", help="evaluate acceptance criteria on summary CSVs")
    accept.add_argument("--in", dest="inputs", nargs="+", required=True, metavar="SUMMARY")
    accept.add_argument("--skip-oracles", action="store_true", help="do not rerun the oracle suites")
    accept.set_defaults(func=_cmd_accept)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
