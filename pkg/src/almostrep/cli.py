"""Command-line entry point: ``almostrep <scenario> [--config PATH] [--seed N] [--out PATH] [--format json|csv]``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError
from .harness import SCENARIOS, ExperimentConfig, emit, run


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almostrep",
        description="Randomised verification sweeps for matrix corrections and "
                    "almost-representation pipelines.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} sweep")
        p.add_argument("--config", help="JSON ExperimentConfig; its scenario field is overridden")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--workers", type=int, default=1, help="thread pool size for trials")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 2
    try:
        config = ExperimentConfig.from_dict(data, scenario=args.scenario, seed=args.seed)
        report = run(config, workers=args.workers)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    payload = emit(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    failures = report.failures
    if failures:
        print(f"{len(failures)} certificate(s) failed", file=sys.stderr)
    return 0 if not failures else 1


if __name__ == "__main__":
    sys.exit(main())
