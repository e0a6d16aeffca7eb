"""Command-line entry point.

    mimodeploy run --config scenario.ini --out results.csv [--format csv|jsonl]
                   [--seed N] [--trials N] [--workers N]
    mimodeploy sweep --config scenario.ini --axis n_clusters --values 1,2,4
                     --out sweep.csv
    mimodeploy validate --config scenario.ini

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import load_config, sweep_values
from .errors import ConfigError
from .montecarlo import SWEEP_AXES, run_experiment, sweep
from .results import emit_results

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="mimodeploy",
                     description="Massive MIMO downlink MF/ZF Monte Carlo simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--workers", type=int, default=1)

    sw = sub.add_parser("sweep", help="run one scenario per value of an axis")
    sw.add_argument("--config", required=True)
    sw.add_argument("--axis", choices=sorted(SWEEP_AXES))
    sw.add_argument("--values", help="comma-separated list")
    sw.add_argument("--out", required=True)
    sw.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--trials", type=int)
    sw.add_argument("--workers", type=int, default=1)

    val = sub.add_parser("validate", help="parse and check a config without running it")
    val.add_argument("--config", required=True)
    return parser


def _overrides(cfg, args):
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["n_trials"] = args.trials
    return dataclasses.replace(cfg, **changes) if changes else cfg


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE

    try:
        cfg, sweep_spec = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok")
            return EXIT_OK
        cfg = _overrides(cfg, args)
        if args.command == "sweep":
            if args.axis is not None and args.values is not None:
                axis = args.axis
                values = sweep_values(axis, args.values.split(","))
            elif args.axis is None and args.values is None and sweep_spec is not None:
                axis, values = sweep_spec.axis, sweep_spec.values
            else:
                print("mimodeploy sweep: give --axis and --values, or a [sweep] "
                      "section in the config", file=sys.stderr)
                return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.workers < 1:
        print("mimodeploy: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "run":
            res = run_experiment(cfg, workers=args.workers)
            emit_results([(cfg.label, None, res)], args.out, args.format)
        else:
            points = sweep(cfg, axis, values, workers=args.workers)
            emit_results([(p.result.config.label, p.value, p.result) for p in points],
                         args.out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported via exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
