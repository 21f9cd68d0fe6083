"""Influences and the globalness machinery built on them.

Generalized influences I_S(f) are computed two independent ways (definitional
difference operators and a zeta transform of the squared spectrum) and
cross-checked. On top of the table sit the beta-smallness quantity, the
spectrum-concentration bounds, the globalness/influence equivalence lemmas, the
Margulis-Russo derivative identity, and the explicit-constant junta theorem.

Conditional statements are handled uniformly: each check reports whether the
hypothesis held and whether the conclusion held, and a run fails only on a
(hypothesis true, conclusion false) outcome. Hypothesis satisfaction is always
reported so vacuous passes stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    Bias,
    BiasedFunction,
    Restriction,
    bits,
    leq_slack,
    popcounts,
    rel_close,
    restrict,
    superset_sums,
    transform,
    truncate,
    weights,
)

MAX_TABLE_N = 20
CROSS_CHECK_N = 10


# ---------------------------------------------------------------------------
# influence tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InfluenceTable:
    """All 2^n generalized influences of one function, plus the total influence."""

    n: int
    bias: Bias
    gen_inf: np.ndarray
    total: float

    def __post_init__(self):
        arr = np.asarray(self.gen_inf, dtype=np.float64).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "gen_inf", arr)

    def value(self, S: int) -> float:
        return float(self.gen_inf[S])

    def max_over_size(self, size: int) -> tuple[float, int]:
        """(max I_S, argmax S) over |S| = size; (-inf, -1) if no such set."""
        pc = popcounts(self.n)
        sel = np.flatnonzero(pc == size)
        if sel.size == 0:
            return float("-inf"), -1
        j = sel[np.argmax(self.gen_inf[sel])]
        return float(self.gen_inf[j]), int(j)


def _definitional_gen_influences(f: BiasedFunction) -> np.ndarray:
    """I_S = E[(prod_{i in S}(f_{i->1} - f_{i->0}) f)^2] for every S, by a DFS
    that shares difference-operator prefixes; O(4^n) time, O(n 2^n) memory."""
    n = f.n
    w = f.weights()
    out = np.zeros(1 << n)

    def rec(table: np.ndarray, i: int, S: int) -> None:
        if i == n:
            out[S] = float(w @ (table * table))
            return
        rec(table, i + 1, S)
        rec(_lift_difference(table, i), i + 1, S | (1 << i))

    rec(np.array(f.values), 0, 0)
    return out


def _lift_difference(table: np.ndarray, i: int) -> np.ndarray:
    """f_{i->1} - f_{i->0}, lifted so the result ignores coordinate i."""
    blk = table.reshape(-1, 2, 1 << i)
    d = blk[:, 1, :] - blk[:, 0, :]
    out = np.empty_like(table).reshape(-1, 2, 1 << i)
    out[:, 0, :] = d
    out[:, 1, :] = d
    return out.reshape(-1)


def influence_table(f: BiasedFunction, tol: float = DEFAULT_TOL) -> InfluenceTable:
    """Generalized influences for all S via the zeta transform of the squared
    spectrum, cross-checked against the definitional route on n <= 10."""
    if f.n > MAX_TABLE_N:
        raise ValueError(f"influence tables are capped at n <= {MAX_TABLE_N}")
    coeffs = transform(f).coeffs
    zsum = superset_sums(coeffs * coeffs, f.n)
    pc = popcounts(f.n).astype(np.float64)
    gen = zsum * np.power(f.bias.sigma, -2.0 * pc)

    if f.n <= CROSS_CHECK_N:
        # the iterated-difference route carries no sigma factors of its own
        ref = _definitional_gen_influences(f)
        scale = 1.0 + np.abs(gen) + np.abs(ref)
        if np.any(np.abs(gen - ref) > 1e-9 * scale):
            raise AssertionError("definitional and spectral influences disagree")

    total_spectral = float(np.sum(pc * coeffs * coeffs)) / (f.bias.p * (1.0 - f.bias.p))
    total_direct = 0.0
    for i in range(f.n):
        blk = f.values.reshape(-1, 2, 1 << i)
        d = blk[:, 1, :] - blk[:, 0, :]
        wblk = f.weights().reshape(-1, 2, 1 << i)
        total_direct += float(np.sum((wblk[:, 0, :] + wblk[:, 1, :]) * d * d))
    if not rel_close(total_spectral, total_direct, 1e-9):
        raise AssertionError("spectral and direct total influence disagree")

    return InfluenceTable(f.n, f.bias, gen, total_spectral)


def beta_smallness(f: BiasedFunction, nonempty_only: bool = False,
                   table: InfluenceTable | None = None) -> float:
    """beta = max_S I_S(f) / E[f^2], over all S or only nonempty S."""
    norm2 = float(f.weights() @ (f.values * f.values))
    if norm2 <= 0.0:
        raise ValueError("beta-smallness is undefined for the zero function")
    t = table if table is not None else influence_table(f)
    gi = t.gen_inf[1:] if nonempty_only else t.gen_inf
    return float(gi.max(initial=0.0)) / norm2


# ---------------------------------------------------------------------------
# restriction means and globalness
# ---------------------------------------------------------------------------

def restriction_means(f: BiasedFunction) -> np.ndarray:
    """table[J] = mu_p(f_{J->1}) for every J, via one zeta transform:
    mu_p(f_{J->1}) = (sum over x containing J of mu_p(x) f(x)) / p^{|J|}."""
    w = f.weights()
    z = superset_sums(w * f.values, f.n)
    pc = popcounts(f.n).astype(np.float64)
    return z / np.power(f.bias.p, pc)


def is_global(f: BiasedFunction, r: int, delta: float, tol: float = DEFAULT_TOL) -> bool:
    """(r, delta)-global: mu_p(f_{J->1}) <= mu_p(f) + delta for all |J| <= r."""
    means = restriction_means(f)
    pc = popcounts(f.n)
    mu = f.expectation()
    sel = means[pc <= r]
    return bool(np.all(sel <= mu + delta + tol * (1.0 + np.abs(sel) + abs(mu + delta))))


def _is_zero_one(f: BiasedFunction, tol: float) -> bool:
    return f.is_boolean(tol)


def _is_pm_zero_one(f: BiasedFunction, tol: float) -> bool:
    v = np.abs(f.values)
    return bool(np.all(np.minimum(v, np.abs(v - 1.0)) <= tol))


# ---------------------------------------------------------------------------
# spectrum concentration (conditional harness)
# ---------------------------------------------------------------------------

def verify_concentration(f: BiasedFunction, r: int, delta: float,
                         tol: float = DEFAULT_TOL) -> dict:
    """Five concentration bounds for the low-degree part f^{<= r}.

    Every branch records (hypothesis_held, conclusion_held, lhs, rhs); the
    report fails only when some hypothesis held and its conclusion did not.
    """
    if r < 0:
        raise ValueError("degree r must be >= 0")
    if not _is_pm_zero_one(f, tol):
        raise ValueError("verify_concentration expects {0,1}- or {-1,0,1}-valued input")
    boolean = _is_zero_one(f, tol)
    p = f.bias.p
    sigma2 = f.bias.sigma ** 2
    mu = f.expectation()
    norm2sq = float(f.weights() @ (f.values * f.values))
    low = truncate(f, r)
    low2sq = float(low.weights() @ (low.values * low.values))
    low_tab = influence_table(low)
    tab = influence_table(f)
    pc = popcounts(f.n)
    total = tab.total

    branches: dict[str, dict] = {}

    def record(name: str, hyp: bool, lhs: float, rhs: float) -> None:
        branches[name] = {
            "hypothesis_held": bool(hyp),
            "conclusion_held": bool(leq_slack(lhs, rhs, tol)),
            "lhs": lhs,
            "rhs": rhs,
        }

    # uniform-measure warm-up: ||f^{<=r}||_2^2 <= 3^r mu(f)^{1.5}
    record("warm_up",
           boolean and abs(p - 0.5) <= 1e-12 and r >= 1,
           low2sq, 3.0 ** r * mu ** 1.5 if mu >= 0 else 0.0)

    # spectral-sample bound for any projection: here onto degrees <= r
    g4 = float(low.weights() @ low.values ** 4) ** 0.25
    record("nt", True, low2sq, g4 * norm2sq ** 0.75)

    # ||f^{<=r}||_2^2 <= 5^r delta^{1/3} E[f^2] under small influences of f^{<=r}
    small_low = bool(np.all(low_tab.gen_inf[pc <= r] <= delta + tol))
    record("normsense0", r >= 1 and small_low, low2sq,
           5.0 ** r * delta ** (1.0 / 3.0) * norm2sq)

    # global + sparse: ||f^{<=r}||_2^2 <= 10^r delta^{1/3} mu_p(f)
    hyp_ns = (boolean and r >= 1 and p <= 0.5 + 1e-12 and mu < delta
              and is_global(f, r, delta, tol))
    record("normsense", hyp_ns, low2sq, 10.0 ** r * delta ** (1.0 / 3.0) * mu)

    # ||f^{<=r}||_2^2 <= mu^2 + 5^{r-1} delta^{1/3} sigma^2 I[f]
    small_low_ne = bool(np.all(low_tab.gen_inf[(pc <= r) & (pc > 0)] <= delta + tol)) \
        if r >= 1 else True
    record("normtruncate", boolean and small_low_ne, low2sq,
           mu ** 2 + 5.0 ** (r - 1) * delta ** (1.0 / 3.0) * sigma2 * total)

    passed = all(not (b["hypothesis_held"] and not b["conclusion_held"])
                 for b in branches.values())
    satisfied = sum(1 for b in branches.values() if b["hypothesis_held"])
    return {"branches": branches, "passed": passed,
            "hypotheses_satisfied": satisfied, "r": r, "delta": delta}


# ---------------------------------------------------------------------------
# globalness <-> influence equivalences (conditional harness)
# ---------------------------------------------------------------------------

def verify_equivalence_lemmas(f: BiasedFunction, r: int, delta: float,
                              tol: float = DEFAULT_TOL) -> dict:
    """Four equivalences between (r, delta)-globalness and generalized
    influences. All four live under the standing assumption p <= 1/2, which is
    part of each hypothesis here."""
    if r < 0:
        raise ValueError("degree r must be >= 0")
    if not _is_zero_one(f, tol):
        raise ValueError("verify_equivalence_lemmas expects Boolean input")
    p = f.bias.p
    half = p <= 0.5 + 1e-12
    mu = f.expectation()
    monotone = f.is_monotone()
    glob = is_global(f, r, delta, tol)
    tab = influence_table(f)
    low_tab = influence_table(truncate(f, r))
    pc = popcounts(f.n)
    sel = pc <= r
    sel_ne = sel & (pc > 0)

    branches: dict[str, dict] = {}

    def conclusion_all(mask, bound):
        vals = tab.gen_inf[mask]
        return bool(np.all(vals <= bound + tol * (1.0 + np.abs(vals) + abs(bound))))

    # global + sparse controls all small generalized influences, before and
    # after truncation
    hyp = glob and mu <= delta + tol and half
    trunc_ok = bool(np.all(low_tab.gen_inf[sel]
                           <= tab.gen_inf[sel] + tol * (1.0 + np.abs(tab.gen_inf[sel]))))
    branches["gen_influence_control"] = {
        "hypothesis_held": hyp,
        "conclusion_held": trunc_ok and conclusion_all(sel, 8.0 ** r * delta),
    }

    # monotone + global controls nonempty small influences without sparsity
    branches["rem"] = {
        "hypothesis_held": monotone and glob and half,
        "conclusion_held": conclusion_all(sel_ne, 8.0 ** r * delta),
        "skipped_non_monotone": not monotone,
    }

    # monotone + global survives single-coordinate restrictions
    hyp_res = monotone and glob and half and r >= 1
    concl_res = True
    for i in range(f.n):
        up = restrict(f, Restriction(1 << i, 1 << i))
        down = restrict(f, Restriction(1 << i, 0))
        if not is_global(up, r - 1, delta, tol):
            concl_res = False
            break
        if down.expectation() < mu - p * delta / (1.0 - p) - tol * (1 + abs(mu)):
            concl_res = False
            break
        if not is_global(down, r - 1, delta / (1.0 - p), tol):
            concl_res = False
            break
    branches["restrict"] = {
        "hypothesis_held": hyp_res,
        "conclusion_held": concl_res,
    }

    # converse: small nonempty influences force globalness
    hyp_conv = half and r >= 1 and bool(np.all(tab.gen_inf[sel_ne] <= delta + tol))
    branches["converse"] = {
        "hypothesis_held": hyp_conv,
        "conclusion_held": is_global(f, r, 4.0 ** r * delta, tol),
    }

    passed = all(not (b["hypothesis_held"] and not b["conclusion_held"])
                 for b in branches.values())
    satisfied = sum(1 for b in branches.values() if b["hypothesis_held"])
    return {"branches": branches, "passed": passed,
            "hypotheses_satisfied": satisfied, "r": r, "delta": delta}


# ---------------------------------------------------------------------------
# Margulis-Russo
# ---------------------------------------------------------------------------

def _mu_at(f: BiasedFunction, p: float) -> float:
    return float(weights(f.n, p) @ f.values)


def russo_check(f: BiasedFunction, p: float, h: float, tol: float = DEFAULT_TOL) -> dict:
    """Central difference of p -> mu_p(f) against the total influence at p.

    The step error is h^2/6 * mu'''(xi) with xi within h of p; C_f is estimated
    from third central differences around p (max of three estimates, x1.5
    safety) plus an additive floor.
    """
    if not f.is_boolean(tol):
        raise ValueError("russo_check expects Boolean input")
    if not f.is_monotone():
        raise ValueError("russo_check expects monotone input")
    if h <= 0 or p - 2 * h <= 0.0 or p + 2 * h >= 1.0:
        raise ValueError("need 0 < p-2h and p+2h < 1")
    central = (_mu_at(f, p + h) - _mu_at(f, p - h)) / (2.0 * h)
    at_p = BiasedFunction(f.n, Bias(p), f.values)
    infl = influence_table(at_p).total
    err = abs(central - infl)

    third = []
    for c in (p - h, p, p + h):
        if c - 2 * h > 0.0 and c + 2 * h < 1.0:
            third.append(abs(_mu_at(f, c + 2 * h) - 2 * _mu_at(f, c + h)
                             + 2 * _mu_at(f, c - h) - _mu_at(f, c - 2 * h)) / (2 * h ** 3))
    c_f = 1.5 * max(third, default=0.0) / 6.0 + 1e-9 * (1.0 + abs(infl))
    return {
        "mu": _mu_at(f, p),
        "central_difference": central,
        "influence": infl,
        "error": err,
        "C_f": c_f,
        "bound": c_f * h ** 2,
        "passed": leq_slack(err, c_f * h ** 2, tol),
    }


# ---------------------------------------------------------------------------
# explicit-constant junta theorem
# ---------------------------------------------------------------------------

def verify_bourgain_pp(f: BiasedFunction, tol: float = DEFAULT_TOL) -> dict:
    """For Boolean f with K = p I[f] / (mu (1-mu)): some nonempty S of size at
    most 2K carries I_S(f) >= 5^{-8K}.

    The size-floor(2K) and size-ceil(2K) rows are reported separately; the
    assertion takes the max over all nonempty sizes up to ceil(2K), which is
    what covers spectra with no mass at the exact size (a dictator at p = 1/2
    has every size-4 influence equal to zero while I_{1} = 1). A mismatch flag
    records when either exact-size row alone would have failed.
    """
    if not f.is_boolean(tol):
        raise ValueError("verify_bourgain_pp expects Boolean input")
    mu = f.expectation()
    if not (0.0 < mu < 1.0):
        raise ValueError("mu_p(f) must lie strictly between 0 and 1")
    tab = influence_table(f)
    K = f.bias.p * tab.total / (mu * (1.0 - mu))
    threshold = 5.0 ** (-8.0 * K)
    lo = max(1, min(f.n, math.floor(2 * K)))
    hi = max(1, min(f.n, math.ceil(2 * K)))
    clipped = 2 * K > f.n

    # the threshold can sit far below any additive slack (5^{-16} ~ 2e-12 for
    # a dictator), so compare multiplicatively
    def meets(val):
        return bool(val >= threshold * (1.0 - tol))

    rows = {}
    for name, size in (("floor", lo), ("ceil", hi)):
        val, arg = tab.max_over_size(size)
        rows[name] = {"size": size, "max_influence": val, "argmax": arg,
                      "meets_bound": meets(val)}

    pc = popcounts(f.n)
    sel = (pc >= 1) & (pc <= hi)
    idx = np.flatnonzero(sel)
    best_j = idx[np.argmax(tab.gen_inf[idx])]
    best = float(tab.gen_inf[best_j])
    passed = meets(best)

    # pad the witness up to the ceil size for reporting
    witness = int(best_j)
    padded = witness
    for i in range(f.n):
        if bin(padded).count("1") >= hi:
            break
        padded |= 1 << i
    return {
        "K": K,
        "threshold": threshold,
        "rows": rows,
        "best": {"influence": best, "set": witness, "size": int(pc[best_j]),
                 "padded_superset": padded},
        "clipped": clipped,
        "exact_size_mismatch": bool(passed and not (rows["floor"]["meets_bound"]
                                                    or rows["ceil"]["meets_bound"])),
        "passed": passed,
    }
