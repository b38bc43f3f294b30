"""``fpp-lab <experiment> --config <file> --out <dir>``.

Exit status: 0 when the run finished and every invariant held, 2 on an
invariant violation, 1 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .config import load_config
from .errors import ConfigError, FPPError, InvariantViolation
from .experiments import EXPERIMENTS, run_experiment

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fpp-lab", description="Run a first-passage percolation experiment.")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", required=True, help="flat 'key = value' config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, help="override the config's worker count")
    p.add_argument("--no-plot", action="store_true", help="skip plot.svg")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, name=args.experiment)
        if args.workers is not None:
            cfg = dataclasses.replace(cfg, workers=args.workers)
        report = run_experiment(args.experiment, cfg)
    except InvariantViolation as exc:
        print(f"fpp-lab: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ConfigError, FPPError, ValueError) as exc:
        print(f"fpp-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    paths = report.write(args.out, plot=not args.no_plot)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    if not report.ok:
        bad = ", ".join(k for k, v in report.invariants.items() if not v)
        print(f"fpp-lab: invariant violated: {bad}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
