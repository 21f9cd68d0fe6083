#!/usr/bin/env python3
"""Measure boosting under small restrictions of an anti-tribes function.

For f = AND of s disjoint ORs of width w at bias p, prints the best
measure mu(f_{J -> 1}) achievable with |J| = m for each m, next to the
closed form, the ratio to mu(f), and the 2^{m/s} doubling column that
only means something in the tuned regime s (1-p)^w ~ 1.

    python3 scripts/explore_boost.py --tribes 3 --width 2 --p 0.3
    python3 scripts/explore_boost.py --tribes 4 --width 2 --p 0.25 --pinned 1
"""

import argparse
import sys

from biasedcube import (
    boost_profile_check,
    boost_search,
    pinned_anti_tribes_function,
    pinned_boost_spot_check,
)


def parse_args(argv=None) -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tribes", type=int, default=3, metavar="S")
    ap.add_argument("--width", type=int, default=2, metavar="W")
    ap.add_argument("--p", type=float, default=0.3)
    ap.add_argument("--max-size", type=int, default=None)
    ap.add_argument("--pinned", type=int, default=None, metavar="T",
                    help="multiply by T pinned coordinates and show the "
                    "no-boost gate e^{-K/2} instead")
    return ap.parse_args(argv)


def run_plain(args) -> int:
    rep = boost_profile_check(args.tribes, args.width, args.p,
                              max_size=args.max_size)
    mu = rep["mu"]
    print(f"anti-tribes s={args.tribes} w={args.width} p={args.p}: "
          f"mu = {mu:.6g}, K = p I[f] / mu = {rep['K']:.6g}")
    print(f"{'m':>3}  {'best mu(f_J->1)':>16}  {'closed form':>12}  "
          f"{'ratio':>10}  {'2^(m/s) mu':>12}")
    for row in rep["rows"]:
        ratio = "-" if mu == 0.0 else f"{row['mu_boosted'] / mu:.4g}"
        print(f"{row['size']:>3}  {row['mu_boosted']:>16.6g}  "
              f"{row['profile']:>12.6g}  {ratio:>10}  "
              f"{row['doubling_column']:>12.6g}")
    return 0 if rep["passed"] else 1


def run_pinned(args) -> int:
    t = args.pinned
    rep = pinned_boost_spot_check(args.tribes, args.width, t, args.p)
    f = pinned_anti_tribes_function(args.tribes, args.width, t, args.p)
    print(f"pinned anti-tribes s={args.tribes} w={args.width} t={t} "
          f"p={args.p} (n = {f.n}): K = {rep['K']:.6g}, "
          f"gate e^(-K/2) = {rep['gate']:.6g}")
    print(f"{'m':>3}  {'best mu(f_J->1)':>16}  {'tribe bound':>12}  "
          f"{'above gate':>10}")
    for row in rep["rows"]:
        above = "no" if row["below_gate"] else "yes"
        print(f"{row['size']:>3}  {row['mu_boosted']:>16.6g}  "
              f"{row['tribe_bound']:>12.6g}  {above:>10}")
    print(f"first boost above the gate needs m > {rep['cutoff']}")
    return 0 if rep["passed"] else 1


def main(argv=None) -> int:
    args = parse_args(argv)
    if args.pinned is not None:
        return run_pinned(args)
    return run_plain(args)


if __name__ == "__main__":
    sys.exit(main())
