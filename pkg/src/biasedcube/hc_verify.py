"""Corpus generation and inequality harnesses for the fourth-moment theorems.

The three verifiers package the explicit-constant hypercontractive bounds:
the beta-smallness fourth-moment bound at rho = 1/5, its derivative-norm
variant at rho = 1/sqrt(24), the term-by-term chain at rho <= 1/sqrt(12),
and the degree-r consequences for the 4-norm and general q-norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    Bias,
    BiasedFunction,
    biased_norm,
    from_spectrum,
    leq_slack,
    moment,
    popcounts,
    superset_sums,
    transform,
)
from .influence import influence_table
from .noise_ops import noise_apply

THM_ONE_RHO = 0.2
HYP_PLUS_RHO = 1.0 / math.sqrt(24.0)
TERM_BOUND_RHO_MAX = 1.0 / math.sqrt(12.0)
MAX_HC_N = 14

TAGS = (
    "random_boolean",
    "bounded_degree",
    "dictator",
    "parity",
    "and",
    "junta",
    "tribes",
    "anti_tribes",
    "hamming_ball",
)


# ---------------------------------------------------------------------------
# closed forms for the tribes families
# ---------------------------------------------------------------------------

def anti_tribes_mu(p: float, s: int, w: int) -> float:
    """mu_p of f_{s,w}, the AND of s disjoint width-w ORs."""
    return (1.0 - (1.0 - p) ** w) ** s


def anti_tribes_total_influence(p: float, s: int, w: int) -> float:
    """d/dp of the f_{s,w} measure, which is its p-biased total influence."""
    return s * w * (1.0 - p) ** (w - 1) * (1.0 - (1.0 - p) ** w) ** (s - 1)


def tribes_mu(p: float, s: int, w: int) -> float:
    """mu_p of the OR of s disjoint width-w ANDs."""
    return 1.0 - (1.0 - p ** w) ** s


def tribes_total_influence(p: float, s: int, w: int) -> float:
    return s * w * p ** (w - 1) * (1.0 - p ** w) ** (s - 1)


def tribes_values(n: int, s: int, w: int, anti: bool = False) -> np.ndarray:
    """Truth table on n coordinates; blocks are [j*w, (j+1)*w), j < s.

    anti=False: OR of block-ANDs. anti=True: f_{s,w}, the AND of block-ORs.
    """
    if s < 1 or w < 1 or s * w > n:
        raise ValueError(f"tribes shape s={s}, w={w} does not fit in n={n}")
    vals = np.empty(1 << n)
    for x in range(1 << n):
        blocks = []
        for j in range(s):
            block = (x >> (j * w)) & ((1 << w) - 1)
            blocks.append(block == (1 << w) - 1 if not anti else block != 0)
        vals[x] = float(all(blocks) if anti else any(blocks))
    return vals


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorpusSpec:
    """What to generate: n values, p values, and per-tag counts for each
    (n, p) combination."""

    ns: tuple[int, ...]
    ps: tuple[float, ...]
    counts: dict[str, int] = field(default_factory=dict)
    tribes_shape: tuple[int, int] | None = None  # (s, w); None picks per n
    max_degree: int = 3
    junta_arity: int = 3

    def __post_init__(self):
        if not self.ns or not self.ps:
            raise ValueError("corpus spec needs at least one n and one p")
        unknown = set(self.counts) - set(TAGS)
        if unknown:
            raise ValueError(f"unknown corpus tags: {sorted(unknown)}")
        if self.tribes_shape is not None:
            s, w = self.tribes_shape
            needs_tribes = any(self.counts.get(t, 0) > 0
                               for t in ("tribes", "anti_tribes"))
            if needs_tribes and s * w > min(self.ns):
                raise ValueError(
                    f"tribes shape {s}x{w} exceeds the smallest n = {min(self.ns)}")


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    function: BiasedFunction
    tag: str
    params: dict


@dataclass(frozen=True, eq=False)
class Corpus:
    seed: int
    entries: tuple[CorpusEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _tribes_shape_for(n: int, spec: CorpusSpec, rng) -> tuple[int, int]:
    if spec.tribes_shape is not None:
        return spec.tribes_shape
    w = 2 if n < 6 else int(rng.choice([2, 3]))
    s = max(1, min(3, n // w))
    return s, w


def _make_entry(tag: str, n: int, bias: Bias, rng, spec: CorpusSpec):
    size = 1 << n
    if tag == "random_boolean":
        density = float(rng.uniform(0.05, 0.95))
        vals = (rng.random(size) < density).astype(float)
        return BiasedFunction(n, bias, vals), {"density": density}
    if tag == "bounded_degree":
        d = int(rng.integers(0, spec.max_degree + 1))
        pc = popcounts(n)
        coeffs = np.where(pc <= d, rng.standard_normal(size), 0.0)
        return from_spectrum(n, bias, coeffs), {"degree": d}
    if tag == "dictator":
        i = int(rng.integers(0, n))
        vals = np.array([float((x >> i) & 1) for x in range(size)])
        return BiasedFunction(n, bias, vals), {"coordinate": i}
    if tag == "parity":
        S = int(rng.integers(1, size))
        vals = np.array([float(bin(x & S).count("1") & 1) for x in range(size)])
        return BiasedFunction(n, bias, vals), {"set": S}
    if tag == "and":
        k = int(rng.integers(1, n + 1))
        S = int(np.sum(1 << rng.choice(n, size=k, replace=False)))
        vals = np.array([float((x & S) == S) for x in range(size)])
        return BiasedFunction(n, bias, vals), {"set": S}
    if tag == "junta":
        k = min(spec.junta_arity, n)
        coords = sorted(int(c) for c in rng.choice(n, size=k, replace=False))
        table = (rng.random(1 << k) < 0.5).astype(float)
        vals = np.empty(size)
        for x in range(size):
            key = 0
            for j, c in enumerate(coords):
                key |= ((x >> c) & 1) << j
            vals[x] = table[key]
        return BiasedFunction(n, bias, vals), {"coordinates": coords}
    if tag in ("tribes", "anti_tribes"):
        s, w = _tribes_shape_for(n, spec, rng)
        vals = tribes_values(n, s, w, anti=(tag == "anti_tribes"))
        return BiasedFunction(n, bias, vals), {"s": s, "w": w}
    if tag == "hamming_ball":
        t = int(rng.integers(1, n + 1))
        pc = popcounts(n)
        vals = (pc >= t).astype(float)
        return BiasedFunction(n, bias, vals), {"threshold": t}
    raise ValueError(f"unknown corpus tag: {tag}")


def _spot_assert(tag: str, f: BiasedFunction, params: dict) -> None:
    p = f.bias.p
    if tag == "anti_tribes":
        want = anti_tribes_mu(p, params["s"], params["w"])
        if abs(f.expectation() - want) > 1e-12:
            raise AssertionError("anti-tribes measure deviates from closed form")
    elif tag == "tribes":
        want = tribes_mu(p, params["s"], params["w"])
        if abs(f.expectation() - want) > 1e-12:
            raise AssertionError("tribes measure deviates from closed form")
    elif tag == "and":
        S = params["set"]
        if abs(f.expectation() - p ** bin(S).count("1")) > 1e-12:
            raise AssertionError("AND measure deviates from p^|S|")
    elif tag == "bounded_degree":
        pc = popcounts(f.n)
        coeffs = transform(f).coeffs
        if np.any(np.abs(coeffs[pc > params["degree"]]) > 1e-9):
            raise AssertionError("bounded-degree entry has high-degree mass")
    elif tag == "junta":
        mask = 0
        for c in params["coordinates"]:
            mask |= 1 << c
        vals = f.values
        for x in range(1 << f.n):
            if vals[x] != vals[x & mask]:
                raise AssertionError("junta entry depends on coordinates outside its set")
    elif tag == "hamming_ball":
        if not f.is_monotone():
            raise AssertionError("hamming ball entry is not monotone")
    elif tag in ("random_boolean", "dictator", "parity"):
        if not f.is_boolean():
            raise AssertionError(f"{tag} entry is not 0/1-valued")


def generate_corpus(seed: int, spec: CorpusSpec) -> Corpus:
    """Deterministic corpus: every entry's stream is keyed by
    (seed, n-index, p-index, tag-index, copy-index)."""
    entries = []
    for ni, n in enumerate(spec.ns):
        for pi, p in enumerate(spec.ps):
            bias = Bias(p)
            for ti, tag in enumerate(TAGS):
                for k in range(spec.counts.get(tag, 0)):
                    rng = np.random.default_rng([seed, ni, pi, ti, k])
                    f, params = _make_entry(tag, n, bias, rng, spec)
                    _spot_assert(tag, f, params)
                    entries.append(CorpusEntry(f, tag, params))
    return Corpus(seed, tuple(entries))


def default_corpus_spec(max_n: int = 12, per_combo: int = 2) -> CorpusSpec:
    """The stock corpus: mixed sizes up to max_n, the four stock biases, and
    per_combo copies of every tag at each (n, p)."""
    ns = tuple(n for n in (4, 6, 8, 10, 12) if n <= max_n)
    return CorpusSpec(
        ns=ns,
        ps=(0.02, 0.1, 0.3, 0.5),
        counts={tag: per_combo for tag in TAGS},
    )


# ---------------------------------------------------------------------------
# inequality harnesses
# ---------------------------------------------------------------------------

def _derivative_norms_sq(f: BiasedFunction) -> np.ndarray:
    # ||D_S f||_2^2 = sum_{E >= S} fhat(E)^2, all S in one zeta transform
    coeffs = transform(f).coeffs
    return superset_sums(coeffs * coeffs, f.n)


def verify_global_hc(f: BiasedFunction, tol: float = DEFAULT_TOL) -> dict:
    """Fourth-moment bounds from influence smallness.

    beta is the worst ratio I_S(f) / E[f^2] over all S and feeds the rho = 1/5
    bound; beta' is the worst lambda^|S| ||D_S f||_2^2 / E[f^2] and feeds the
    rho = 1/sqrt(24) bound.
    """
    if f.n > MAX_HC_N:
        raise ValueError(f"verify_global_hc is capped at n <= {MAX_HC_N}")
    norm2sq = moment(f, 2.0)
    if norm2sq <= 0.0:
        raise ValueError("the zero function has no beta-smallness")
    tab = influence_table(f)
    beta = float(tab.gen_inf.max()) / norm2sq
    zsum = _derivative_norms_sq(f)
    pc = popcounts(f.n).astype(np.float64)
    beta_prime = float(np.max(np.power(f.bias.lam, pc) * zsum)) / norm2sq

    norm2 = math.sqrt(norm2sq)
    bounds = {}
    for name, rho, b in (("beta_quarter", THM_ONE_RHO, beta),
                         ("beta_prime_quarter", HYP_PLUS_RHO, beta_prime)):
        lhs = biased_norm(noise_apply(f, rho), 4.0)
        rhs = b ** 0.25 * norm2
        bounds[name] = {"rho": rho, "lhs": lhs, "rhs": rhs,
                        "holds": leq_slack(lhs, rhs, tol)}
    return {
        "beta": beta,
        "beta_prime": beta_prime,
        "bounds": bounds,
        "passed": all(b["holds"] for b in bounds.values()),
    }


def verify_term_bound(f: BiasedFunction, rho: float, tol: float = DEFAULT_TOL) -> dict:
    """Term-by-term chain at noise rate rho <= 1/sqrt(12):

        E[(T_rho f)^4]
          <= sum_S (3 lambda rho^4)^|S| ||D_S f||_2^4
          <= sum_S (3 sigma^2 rho^4)^|S| I_S(f)^2.
    """
    if not 0.0 < rho <= TERM_BOUND_RHO_MAX + 1e-15:
        raise ValueError(f"term bound needs 0 < rho <= 1/sqrt(12), got {rho}")
    zsum = _derivative_norms_sq(f)
    pc = popcounts(f.n).astype(np.float64)
    lam, sig2 = f.bias.lam, f.bias.sigma ** 2
    if f.bias.p == 0.5 and abs(lam - 1.0) > 1e-12:
        raise AssertionError("lambda must equal 1 at p = 1/2")

    lhs = moment(noise_apply(f, rho), 4.0)
    mid_terms = np.power(3.0 * lam * rho ** 4, pc) * zsum * zsum
    gen_inf = zsum * np.power(sig2, -pc)
    right_terms = np.power(3.0 * sig2 * rho ** 4, pc) * gen_inf * gen_inf
    mid, right = float(mid_terms.sum()), float(right_terms.sum())

    by_size = [[float(mid_terms[pc == k].sum()), float(right_terms[pc == k].sum())]
               for k in range(f.n + 1)]
    return {
        "rho": rho,
        "lhs": lhs,
        "mid": mid,
        "right": right,
        "holds_left": leq_slack(lhs, mid, tol),
        "holds_right": leq_slack(mid, right, tol),
        "by_size": by_size,
        "passed": leq_slack(lhs, mid, tol) and leq_slack(mid, right, tol),
    }


def verify_degree_r(f: BiasedFunction, r: int, qs: tuple = (3, 4, 6),
                    tol: float = DEFAULT_TOL) -> dict:
    """Norm growth of a degree-r function from its worst small-set influence.

    With delta = max_{|S| <= r} I_S(f):
        ||f||_4 <= 5^{3r/4} delta^{1/4} ||f||_2^{1/2}
        ||f||_q <= (2q)^{1.5 r} delta^{(q-2)/2q} ||f||_2^{2/q}.
    """
    if r < 0:
        raise ValueError("degree bound r must be nonnegative")
    coeffs = transform(f).coeffs
    pc = popcounts(f.n)
    high = coeffs[pc > r]
    if high.size and float(np.max(np.abs(high))) > tol * (1.0 + float(np.max(np.abs(coeffs)))):
        raise ValueError(f"function has spectral mass above degree {r}")

    tab = influence_table(f)
    delta = float(tab.gen_inf[pc <= r].max())
    norm2sq = moment(f, 2.0)

    bounds = {}
    lhs4 = biased_norm(f, 4.0)
    rhs4 = 5.0 ** (0.75 * r) * delta ** 0.25 * norm2sq ** 0.25
    bounds["four"] = {"lhs": lhs4, "rhs": rhs4, "holds": leq_slack(lhs4, rhs4, tol)}
    for q in qs:
        lhs = biased_norm(f, float(q))
        rhs = (2.0 * q) ** (1.5 * r) * delta ** ((q - 2.0) / (2.0 * q)) * norm2sq ** (1.0 / q)
        bounds[f"q{q}"] = {"lhs": lhs, "rhs": rhs, "holds": leq_slack(lhs, rhs, tol)}
    return {
        "r": r,
        "delta": delta,
        "bounds": bounds,
        "passed": all(b["holds"] for b in bounds.values()),
    }
