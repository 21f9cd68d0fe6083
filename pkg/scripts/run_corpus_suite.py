#!/usr/bin/env python3
"""Run the whole verification battery over a seeded corpus.

Thin wrapper around the `biasedcube corpus-suite` command so the standard
experiment is one invocation:

    python3 scripts/run_corpus_suite.py --seed 7 --max-n 10 --per-combo 2
"""

import argparse
import sys

from biasedcube.cli import main as cli_main


def parse_args(argv=None) -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-n", type=int, default=10)
    ap.add_argument("--per-combo", type=int, default=2)
    ap.add_argument("--tol", type=float, default=None)
    ap.add_argument("--replay", type=int, default=None,
                    help="re-run a single case index from a previous report")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    cli_argv = ["corpus-suite",
                "--seed", str(args.seed),
                "--max-n", str(args.max_n),
                "--per-combo", str(args.per_combo),
                "--format", args.format]
    if args.tol is not None:
        cli_argv += ["--tol", str(args.tol)]
    if args.replay is not None:
        cli_argv += ["--replay", str(args.replay)]
    return cli_main(cli_argv)


if __name__ == "__main__":
    sys.exit(main())
