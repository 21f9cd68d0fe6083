#!/usr/bin/env python3
"""Locate thresholds of stock monotone functions and measure their width.

For each function the table shows p_t = inf{p : mu_p(f) >= t} at three
levels plus the window p_0.9 - p_0.1; a short window at growing n is the
sharp-threshold picture.

    python3 scripts/threshold_curves.py
    python3 scripts/threshold_curves.py --tribes-width 3
"""

import argparse
import sys

import numpy as np

from biasedcube import (
    Bias,
    BiasedFunction,
    anti_tribes_function,
    critical_probability,
    hamming_ball,
    measure_curve,
    tribes_values,
)


def dictator(n: int) -> BiasedFunction:
    vals = ((np.arange(1 << n) & 1) == 1).astype(float)
    return BiasedFunction(n, Bias(0.5), vals)


def stock_functions(width: int) -> list:
    fns = [("dictator (n=8)", dictator(8))]
    for s in (2, 3, 4):
        n = s * width
        if n > 12:
            continue
        vals = tribes_values(n, s, width)
        fns.append((f"tribes {s}x{width}", BiasedFunction(n, Bias(0.5), vals)))
        fns.append((f"anti-tribes {s}x{width}",
                    anti_tribes_function(s, width, 0.5)))
    fns.append(("majority (n=9)", hamming_ball(9, 0.5, 0.5)))
    fns.append(("majority (n=13)", hamming_ball(13, 0.5, 0.5)))
    return fns


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tribes-width", type=int, default=2)
    ap.add_argument("--levels", type=float, nargs=3,
                    default=(0.1, 0.5, 0.9), metavar=("LO", "MID", "HI"))
    args = ap.parse_args(argv)
    lo, mid, hi = args.levels

    print(f"{'function':<22}  {'p_' + str(lo):>8}  {'p_' + str(mid):>8}  "
          f"{'p_' + str(hi):>8}  {'window':>8}")
    for name, f in stock_functions(args.tribes_width):
        curve = measure_curve(f)
        ps = [critical_probability(curve, t) for t in (lo, mid, hi)]
        window = ps[2] - ps[0]
        print(f"{name:<22}  {ps[0]:>8.4f}  {ps[1]:>8.4f}  {ps[2]:>8.4f}  "
              f"{window:>8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
