"""Independent brute-force reference implementations used to pin test values.

Everything here is deliberately naive (explicit sums over points and subsets,
O(4^n) or worse) and shares no code with the package under test.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def point_weight(x: int, n: int, p: float) -> float:
    k = bin(x).count("1")
    return p ** k * (1.0 - p) ** (n - k)


def chi_value(S: int, x: int, p: float) -> float:
    sigma = math.sqrt(p * (1.0 - p))
    out = 1.0
    for i in range(64):
        if (S >> i) & 1:
            out *= (((x >> i) & 1) - p) / sigma
    return out


def naive_spectrum(values, n: int, p: float) -> np.ndarray:
    """fhat(S) = sum_x mu_p(x) f(x) chi_S(x), by explicit double loop."""
    out = np.zeros(1 << n)
    for S in range(1 << n):
        acc = 0.0
        for x in range(1 << n):
            acc += point_weight(x, n, p) * values[x] * chi_value(S, x, p)
        out[S] = acc
    return out


def naive_expectation(values, n: int, p: float) -> float:
    return sum(point_weight(x, n, p) * values[x] for x in range(1 << n))


def naive_restrict(values, n: int, p: float, S: int, x: int):
    """Pin S-coordinates to the bits of x; survivors keep increasing order."""
    survivors = [i for i in range(n) if not (S >> i) & 1]
    out = []
    for y in range(1 << len(survivors)):
        full = x
        for j, pos in enumerate(survivors):
            if (y >> j) & 1:
                full |= 1 << pos
        out.append(values[full])
    return np.array(out, dtype=float)


def naive_derivative(values, n: int, p: float, S: int) -> np.ndarray:
    """sigma^{|S|} sum over assignments y of S with sign (-1)^{|S|-|y|}, lifted."""
    sigma = math.sqrt(p * (1.0 - p))
    sbits = [i for i in range(n) if (S >> i) & 1]
    out = np.zeros(1 << n)
    for z in range(1 << n):
        acc = 0.0
        for ybits in itertools.product([0, 1], repeat=len(sbits)):
            full = z
            ones = 0
            for b, pos in zip(ybits, sbits):
                if b:
                    full |= 1 << pos
                    ones += 1
                else:
                    full &= ~(1 << pos)
            sign = (-1) ** (len(sbits) - ones)
            acc += sign * values[full]
        out[z] = sigma ** len(sbits) * acc
    return out


def naive_generalized_influence(values, n: int, p: float, S: int) -> float:
    """E[(sum over S-assignments with signs of f_{S->x})^2]: no sigma scaling."""
    sigma = math.sqrt(p * (1.0 - p))
    d = naive_derivative(values, n, p, S)
    return naive_expectation(d * d, n, p) / sigma ** (2 * bin(S).count("1"))


def naive_total_influence(values, n: int, p: float) -> float:
    """Sum over coordinates of E[(f_{i->1} - f_{i->0})^2]."""
    total = 0.0
    for i in range(n):
        acc = 0.0
        for x in range(1 << n):
            hi = values[x | (1 << i)]
            lo = values[x & ~(1 << i)]
            acc += point_weight(x, n, p) * (hi - lo) ** 2
        total += acc
    return total


def naive_noise(values, n: int, p: float, rho: float) -> np.ndarray:
    """(T_rho f)(x) = E[f(y)] where each y_i independently kept w.p. rho else
    resampled from mu_p; computed by explicit transition sums."""
    out = np.zeros(1 << n)
    for x in range(1 << n):
        acc = 0.0
        for y in range(1 << n):
            pr = 1.0
            for i in range(n):
                xi = (x >> i) & 1
                yi = (y >> i) & 1
                base = p if yi else 1.0 - p
                pr *= rho * (1.0 if xi == yi else 0.0) + (1.0 - rho) * base
            acc += pr * values[y]
        out[x] = acc
    return out


def random_table(rng: np.random.Generator, n: int, kind: str = "real") -> np.ndarray:
    if kind == "boolean":
        return (rng.random(1 << n) < rng.uniform(0.2, 0.8)).astype(float)
    return rng.standard_normal(1 << n)
