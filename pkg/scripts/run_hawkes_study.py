#!/usr/bin/env python3
"""Run the self-exciting (conditional-intensity) experiments.

Covers exact vs interval-census scoring under both bundled truths and the
information-gain comparison against a constant-rate baseline.  Outputs land
in ``<out>/<config>/``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ppscores.cli import main as cli_main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

CONFIGS = ["hawkes_f1", "hawkes_f3", "infogain_hawkes"]


def run(args: argparse.Namespace) -> int:
    names = args.only if args.only else CONFIGS
    for name in names:
        cfg = CONFIG_DIR / f"{name}.cfg"
        if not cfg.is_file():
            print(f"error: no bundled config named {name!r}", file=sys.stderr)
            return 2
        argv = ["run", "--config", str(cfg),
                "--out", str(Path(args.out) / name),
                "--threads", str(args.threads)]
        if args.reps is not None:
            argv += ["--reps", str(args.reps)]
        print(f"== {name} ==")
        rc = cli_main(argv)
        if rc != 0:
            return rc
    return 0


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results",
                        help="root output directory (default: results)")
    parser.add_argument("--reps", type=int, default=None,
                        help="override repetition count for every config")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes (default: 1)")
    parser.add_argument("--only", nargs="*", metavar="NAME",
                        help=f"subset of configs to run; choices: {CONFIGS}")
    return parser.parse_args()


if __name__ == "__main__":
    sys.exit(run(parse_args()))
