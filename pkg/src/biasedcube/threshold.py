"""Measure curves, critical probabilities, and sharp-threshold checks.

The curve of a set family is the polynomial p -> mu_p, held as exact level
counts. On top of it sit the critical-probability bisection, the
noise-sensitivity route to sharp thresholds (explicit enough to assert), two
conditional threshold theorems run hypothesis-then-conclusion, and a
boost-profile explorer for the statements whose absolute constants are
unspecified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    MAX_DENSE_N,
    Bias,
    BiasedFunction,
    leq_slack,
    popcounts,
    rel_close,
)
from .hc_verify import anti_tribes_mu, tribes_values
from .influence import influence_table, restriction_means
from .noise_ops import noise_stability

MAX_BOOST_ENUM = 300_000
CURVE_GRID_POINTS = 201
BISECTION_TOL = 1e-12


# ---------------------------------------------------------------------------
# measure curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureCurve:
    """Level counts c_j of a family; mu_p = sum_j c_j p^j (1-p)^(n-j)."""

    n: int
    counts: tuple

    def __post_init__(self):
        if self.n < 0 or len(self.counts) != self.n + 1:
            raise ValueError("need one level count per popcount 0..n")
        cts = tuple(int(c) for c in self.counts)
        for j, c in enumerate(cts):
            if c < 0 or c > math.comb(self.n, j):
                raise ValueError(f"level {j} count {c} out of range")
        object.__setattr__(self, "counts", cts)

    def mu(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        # 0^0 = 1 keeps both endpoints exact
        total = 0.0
        for j, c in enumerate(self.counts):
            if c:
                total += c * p ** j * (1.0 - p) ** (self.n - j)
        return total

    def nondecreasing_on_grid(self, points: int = CURVE_GRID_POINTS,
                              tol: float = DEFAULT_TOL) -> bool:
        ps = np.linspace(0.0, 1.0, points)
        vals = np.array([self.mu(float(p)) for p in ps])
        return bool(np.all(np.diff(vals) >= -tol * (1.0 + np.abs(vals[:-1]))))


def measure_curve(f: BiasedFunction) -> MeasureCurve:
    """Exact level counts of {x: f(x) = 1}, bucketed by popcount."""
    if not f.is_boolean(DEFAULT_TOL):
        raise ValueError("measure_curve expects a Boolean function")
    pc = popcounts(f.n)
    counts = np.bincount(pc[f.values > 0.5], minlength=f.n + 1)
    return MeasureCurve(f.n, tuple(int(c) for c in counts))


def curve_from_masks(masks, n: int) -> MeasureCurve:
    """Level counts of a family given as bitmasks over [n]."""
    if n < 0 or n > MAX_DENSE_N:
        raise ValueError(f"n must lie in 0..{MAX_DENSE_N}")
    counts = [0] * (n + 1)
    seen = set()
    for m in masks:
        m = int(m)
        if m < 0 or m >> n:
            raise ValueError(f"mask {m} does not fit in {n} coordinates")
        if m not in seen:
            seen.add(m)
            counts[m.bit_count()] += 1
    return MeasureCurve(n, tuple(counts))


def critical_probability(curve: MeasureCurve, t: float = 0.5) -> float:
    """p(t) = inf{p: mu_p >= t}, bisected on the exact polynomial.

    Returns the nearest boundary when the level t is never reached (or is
    already exceeded at p = 0).
    """
    if not 0.0 < t < 1.0:
        raise ValueError("threshold level t must lie in (0, 1)")
    if not curve.nondecreasing_on_grid():
        raise ValueError("critical probability needs a monotone curve")
    if curve.mu(0.0) >= t:
        return 0.0
    if curve.mu(1.0) < t:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > BISECTION_TOL:
        mid = (lo + hi) / 2.0
        if curve.mu(mid) >= t:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# sharp-threshold checks at a measure pair
# ---------------------------------------------------------------------------

def threshold_checks(f: BiasedFunction, p: float, q: float,
                     eps: float = 0.25, C: float = 4.0,
                     tol: float = DEFAULT_TOL) -> dict:
    """Sharp-threshold report for one monotone 0/1 table at the pair (p, q).

    The Cauchy-Schwarz route mu_q >= mu_p^2 / Stab_rho with
    rho = p(1-q)/(q(1-p)) is explicit and asserted. The noise-sensitivity
    decay theorem (r = log(2/eps)/log(1/rho), delta = 10^(-3r-1) eps^3) and
    the quasirandom sharp threshold with caller constant C
    (r = C log(1/eps)) run hypothesis-then-conclusion; their verdict is None
    when the hypothesis fails, so corpus drivers can count satisfaction.
    The function's stored bias is ignored; (p, q) fix both measures.
    """
    if not f.is_boolean(tol):
        raise ValueError("threshold_checks expects a Boolean function")
    if not f.is_monotone():
        raise ValueError("threshold_checks expects a monotone function")
    if not 0.0 < p < q < 1.0:
        raise ValueError("need 0 < p < q < 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")

    rho = p * (1.0 - q) / (q * (1.0 - p))
    fp = BiasedFunction(f.n, Bias(p), f.values)
    fq = BiasedFunction(f.n, Bias(q), f.values)
    mu_p = fp.expectation()
    mu_q = fq.expectation()
    stab = noise_stability(fp, rho)

    bound = 0.0 if mu_p == 0.0 else mu_p ** 2 / stab
    prop = {
        "rho": rho,
        "mu_p": mu_p,
        "mu_q": mu_q,
        "stab": stab,
        "bound": bound,
        "holds": leq_slack(bound, mu_q, tol),
    }

    means = restriction_means(fp)
    pc = popcounts(f.n)

    def is_global_at(r: float, delta: float) -> bool:
        sel = means[pc <= math.floor(r)]
        return bool(np.all(sel <= mu_p + delta
                           + tol * (1.0 + np.abs(sel) + mu_p + delta)))

    r_ns = math.log(2.0 / eps) / math.log(1.0 / rho)
    delta_ns = 10.0 ** (-3.0 * r_ns - 1.0) * eps ** 3
    hyp_ns = mu_p < delta_ns and is_global_at(r_ns, delta_ns)
    ns = {
        "eps": eps,
        "r": r_ns,
        "delta": delta_ns,
        "hypothesis": hyp_ns,
        "stab": stab,
        "bound": eps * mu_p,
        "holds": leq_slack(stab, eps * mu_p, tol) if hyp_ns else None,
    }

    r_qr = C * math.log(1.0 / eps)
    delta_qr = 10.0 ** (-3.0 * r_qr - 1.0) * eps ** 3
    hyp_qr = (eps < 0.5 and p < 0.5 and q < 0.5
              and mu_p <= delta_qr + tol
              and is_global_at(r_qr, delta_qr))
    qr = {
        "C": C,
        "eps": eps,
        "r": r_qr,
        "delta": delta_qr,
        "hypothesis": hyp_qr,
        "mu_q": mu_q,
        "bound": mu_p / eps,
        "holds": leq_slack(mu_p / eps, mu_q, tol) if hyp_qr else None,
    }

    return {
        "p": p,
        "q": q,
        "prop": prop,
        "quantitative_ns": ns,
        "qr_sharp_threshold": qr,
        "passed": bool(prop["holds"]
                       and ns["holds"] is not False
                       and qr["holds"] is not False),
    }


# ---------------------------------------------------------------------------
# boost explorer
# ---------------------------------------------------------------------------

def boost_search(f: BiasedFunction, max_size: int) -> dict:
    """Best density boost mu_p(f_{J->1}) over all J of each size <= max_size.

    Explorer, not pass/fail: the statements it probes promise boosts of
    e^{-O(K)} at K = p I[f] / mu_p(f) for unspecified absolute constants, so
    the report carries the maximizing set and boosted measure per size plus K
    and mu^0.01 (the globalness reference power) for inspection by eye.
    """
    if not f.is_boolean(DEFAULT_TOL):
        raise ValueError("boost_search expects a Boolean function")
    if max_size < 0 or max_size > f.n:
        raise ValueError("max_size must lie in [0, n]")
    if sum(math.comb(f.n, m) for m in range(max_size + 1)) > MAX_BOOST_ENUM:
        raise ValueError("boost enumeration budget exceeded")

    means = restriction_means(f)
    pc = popcounts(f.n)
    mu = f.expectation()
    total = influence_table(f).total
    rows = []
    for m in range(max_size + 1):
        sel = np.flatnonzero(pc == m)
        j = int(sel[np.argmax(means[sel])])
        best = float(means[j])
        rows.append({
            "size": m,
            "set": tuple(i for i in range(f.n) if (j >> i) & 1),
            "mu_boosted": best,
            "ratio": None if mu == 0.0 else best / mu,
        })
    return {
        "p": f.bias.p,
        "mu": mu,
        "total_influence": total,
        "K": None if mu == 0.0 else f.bias.p * total / mu,
        "globalness_ref": mu ** 0.01 if mu > 0.0 else 0.0,
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# sharpness examples
# ---------------------------------------------------------------------------

def anti_tribes_function(s: int, w: int, p: float) -> BiasedFunction:
    """The AND of s disjoint width-w ORs on exactly s*w coordinates."""
    n = s * w
    return BiasedFunction(n, Bias(p), tribes_values(n, s, w, anti=True))


def pinned_anti_tribes_function(s: int, w: int, t: int, p: float) -> BiasedFunction:
    """Anti-tribes times the AND of t extra coordinates above the tribes."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = s * w + t
    vals = tribes_values(n, s, w, anti=True).copy()
    top = ((1 << t) - 1) << (s * w)
    x = np.arange(1 << n, dtype=np.int64)
    vals *= ((x & top) == top).astype(np.float64)
    return BiasedFunction(n, Bias(p), vals)


def boost_profile_check(s: int, w: int, p: float, max_size: int = None,
                        tol: float = DEFAULT_TOL) -> dict:
    """Anti-tribes boost profile, asserted exactly.

    The best size-t boost pins one coordinate in each of min(t, s) distinct
    tribes, so it equals (1-(1-p)^w)^(s-min(t,s)); each row also reports the
    2^{t/s} mu comparison column, which is only meaningful in the tuned
    regime s(1-p)^w = 1 and is therefore not asserted.
    """
    f = anti_tribes_function(s, w, p)
    if max_size is None:
        max_size = min(f.n, s + 1)
    rep = boost_search(f, max_size)
    mu = rep["mu"]
    rows = []
    ok = True
    for row in rep["rows"]:
        m = row["size"]
        profile = anti_tribes_mu(p, s - min(m, s), w)
        match = rel_close(row["mu_boosted"], profile, tol)
        ok = ok and match
        rows.append({
            "size": m,
            "mu_boosted": row["mu_boosted"],
            "profile": profile,
            "profile_matches": match,
            "doubling_column": 2.0 ** (m / s) * mu,
        })
    return {"s": s, "w": w, "p": p, "mu": mu, "K": rep["K"],
            "rows": rows, "passed": ok}


def pinned_boost_spot_check(s: int = 4, w: int = 2, t: int = 1,
                            p: float = 0.25, tol: float = DEFAULT_TOL) -> dict:
    """Pinned anti-tribes: no boost above e^{-K/2} until u > s/2.

    Here K = s(1-p)^w and a set of size t+u leaves s-u tribes unpinned at
    best. Asserted: every boost of size <= t + floor(s/2) stays at or below
    e^{-K/2}, and the first size beyond escapes.
    """
    f = pinned_anti_tribes_function(s, w, t, p)
    K = s * (1.0 - p) ** w
    cutoff = t + s // 2
    rep = boost_search(f, min(f.n, cutoff + 1))
    gate = math.exp(-K / 2.0)
    rows = []
    ok = True
    for row in rep["rows"]:
        m = row["size"]
        u = max(m - t, 0)
        below = leq_slack(row["mu_boosted"], gate, tol)
        if m <= cutoff:
            ok = ok and below
        rows.append({
            "size": m,
            "mu_boosted": row["mu_boosted"],
            "gate": gate,
            "below_gate": below,
            "tribe_bound": (1.0 - K / s) ** (s - u),
        })
    escaped = rep["rows"][-1]["size"] == cutoff + 1 \
        and rep["rows"][-1]["mu_boosted"] > gate * (1.0 + tol)
    return {"s": s, "w": w, "t": t, "p": p, "K": K, "gate": gate,
            "cutoff": cutoff, "rows": rows, "escapes_after_cutoff": escaped,
            "passed": ok and escaped}


# ---------------------------------------------------------------------------
# binomial tail
# ---------------------------------------------------------------------------

def binomial_tail_check(n: int, p: float, tol: float = DEFAULT_TOL) -> dict:
    """P(Bin(n,p) >= pn) >= 1/4 by exact summation, for integer pn."""
    if n < 1 or n > 60:
        raise ValueError("n must lie in 1..60")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    k = p * n
    if abs(k - round(k)) > 1e-9:
        raise ValueError("pn must be an integer")
    k = int(round(k))
    tail = sum(math.comb(n, j) * p ** j * (1.0 - p) ** (n - j)
               for j in range(k, n + 1))
    return {"n": n, "p": p, "k": k, "tail": tail,
            "holds": leq_slack(0.25, tail, tol)}
