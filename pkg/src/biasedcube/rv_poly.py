"""Multilinear polynomials over independent finite-support random variables.

Exact moments come from dense evaluation on the product grid of supports
(factor 0 fastest, as in product_space); signed integer moments are
cross-checked against an independent moment-algebra expansion. On top of
the exact machinery sit the general-q hypercontractive bounds and the
invariance-principle gap check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    Bias,
    BiasedFunction,
    leq_slack,
    popcounts,
    superset_sums,
)

MAX_GRID_POINTS = 2_000_000
MAX_EXPANSION_KEYS = 2_000_000


# ---------------------------------------------------------------------------
# random variables and polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteRV:
    """A finite-support real random variable, with an optional declared
    sigma for the moment condition E|Z|^q <= sigma^{2-q}."""

    values: np.ndarray
    probs: np.ndarray
    sigma: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).copy()
        pr = np.asarray(self.probs, dtype=np.float64).copy()
        if vals.ndim != 1 or vals.shape != pr.shape or vals.shape[0] < 1:
            raise ValueError("values and probs must be matching 1-d arrays")
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(pr))):
            raise ValueError("atoms must be finite")
        if np.any(pr <= 0.0) or abs(float(pr.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must be positive and sum to 1")
        if self.sigma is not None and not (0.0 < self.sigma < float("inf")):
            raise ValueError("declared sigma must be positive")
        vals.setflags(write=False)
        pr.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "probs", pr)

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    def mean(self) -> float:
        return float(self.probs @ self.values)

    def variance(self) -> float:
        mu = self.mean()
        return float(self.probs @ (self.values - mu) ** 2)

    def raw_moment(self, k: int) -> float:
        return float(self.probs @ self.values ** k)

    def abs_moment(self, q: float) -> float:
        return float(self.probs @ np.abs(self.values) ** q)

    def is_standard(self, tol: float = 1e-12) -> bool:
        return abs(self.mean()) <= tol and abs(self.variance() - 1.0) <= tol

    @classmethod
    def rademacher(cls) -> "FiniteRV":
        return cls(np.array([-1.0, 1.0]), np.array([0.5, 0.5]), sigma=1.0)

    @classmethod
    def biased_character(cls, p: float) -> "FiniteRV":
        if not 0.0 < p < 1.0:
            raise ValueError("bias must lie strictly between 0 and 1")
        s = math.sqrt(p * (1.0 - p))
        return cls(np.array([-p / s, (1.0 - p) / s]),
                   np.array([1.0 - p, p]), sigma=s)


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    """f = sum_S a_S prod_{i in S} v_i with dense coefficients over bitmasks."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=np.float64).copy()
        if arr.shape != (1 << self.n,):
            raise ValueError(f"need {1 << self.n} coefficients, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            return 0
        return int(popcounts(self.n)[nz].max())

    def w_upsets(self) -> np.ndarray:
        """W_S = sum_{J >= S} a_J^2 for every mask."""
        return superset_sums(self.coeffs * self.coeffs, self.n)

    def w_empty(self) -> float:
        return float(np.sum(self.coeffs * self.coeffs))

    def derivative(self, S: int) -> "MultilinearPoly":
        """D_S: coefficient at U becomes a_{U|S} for U disjoint from S."""
        if not 0 <= S < (1 << self.n):
            raise ValueError("S must be a subset mask of the coordinates")
        masks = np.arange(1 << self.n, dtype=np.int64)
        out = np.where((masks & S) == 0, self.coeffs[masks | S], 0.0)
        return MultilinearPoly(self.n, out)

    def noised(self, rho: float) -> "MultilinearPoly":
        mult = np.power(float(rho), popcounts(self.n).astype(np.float64))
        return MultilinearPoly(self.n, self.coeffs * mult)


@dataclass(frozen=True)
class SmoothTest:
    """A smooth test function with a caller-certified third-derivative bound.

    m3 must come with its derivation (note); it is never estimated here,
    since a silently wrong bound would falsify the checks downstream.
    """

    phi: object
    m3: float
    note: str = ""

    def __post_init__(self):
        if not callable(self.phi):
            raise ValueError("phi must be callable")
        if not (0.0 < self.m3 < float("inf")):
            raise ValueError("m3 must be a positive finite bound")


# ---------------------------------------------------------------------------
# exact expectations on the support grid
# ---------------------------------------------------------------------------

def _check_arity(poly: MultilinearPoly, rvs) -> None:
    if len(rvs) != poly.n:
        raise ValueError(f"polynomial has {poly.n} variables, got {len(rvs)} rvs")


def _grid_points(rvs) -> int:
    out = 1
    for z in rvs:
        out *= z.m
    return out


def grid_values(poly: MultilinearPoly, rvs) -> np.ndarray:
    """f evaluated at every point of the support grid, coordinate 0 fastest."""
    _check_arity(poly, rvs)
    if _grid_points(rvs) > MAX_GRID_POINTS:
        raise ValueError(f"grid budget exceeded: support grid over {MAX_GRID_POINTS} points")
    arr = np.asarray(poly.coeffs, dtype=np.float64)
    lead: tuple = ()
    for i in range(poly.n - 1, -1, -1):
        arr = arr.reshape(*lead, 2, 1 << i)
        v = rvs[i].values
        c0, c1 = arr[..., 0, :], arr[..., 1, :]
        arr = c0[..., None, :] + v[:, None] * c1[..., None, :]
        lead = arr.shape[:-1]
    return arr.reshape(-1)


def grid_weights(rvs) -> np.ndarray:
    w = np.ones(1)
    for z in rvs:
        w = (z.probs[:, None] * w[None, :]).reshape(-1)
    return w


def _expansion_signed_moment(poly: MultilinearPoly, rvs, q: int) -> float:
    """E[f^q] by expanding the power in the per-coordinate moment algebra:
    multilinear products are tracked as degree profiles in base q+1."""
    n, base = poly.n, q + 1
    keys = base ** n
    if keys > MAX_EXPANSION_KEYS:
        raise ValueError("expansion budget exceeded: table too large")
    enc = np.array([sum(base ** i for i in range(n) if (S >> i) & 1)
                    for S in range(1 << n)], dtype=np.int64)
    vec = np.zeros(keys)
    np.add.at(vec, enc, poly.coeffs)
    for _ in range(q - 1):
        nxt = np.zeros(keys)
        nz = np.flatnonzero(vec)
        for S in np.flatnonzero(poly.coeffs):
            np.add.at(nxt, nz + enc[S], vec[nz] * poly.coeffs[S])
        vec = nxt
    mom = np.ones(1)
    for z in rvs:
        row = np.array([z.raw_moment(k) for k in range(base)])
        mom = (row[:, None] * mom[None, :]).reshape(-1)
    return float(vec @ mom)


def exact_expectation(poly: MultilinearPoly, rvs, moment: float | None = None,
                      test=None) -> float:
    """E|f|^q (moment=q, any real q >= 1) or E[phi(f)] (test=phi), exactly.

    Integer moments q <= 4 are additionally cross-checked: the signed grid
    moment must match the independent expansion route to 1e-9.
    """
    _check_arity(poly, rvs)
    if (moment is None) == (test is None):
        raise ValueError("pass exactly one of moment= or test=")
    vals = grid_values(poly, rvs)
    w = grid_weights(rvs)
    if test is not None:
        applied = np.array([float(test(float(v))) for v in vals])
        return float(w @ applied)
    q = float(moment)
    if q < 1.0:
        raise ValueError("moment exponent must be at least 1")
    if q == int(q) and int(q) <= 4 and (int(q) + 1) ** poly.n <= MAX_EXPANSION_KEYS:
        signed_grid = float(w @ vals ** int(q))
        signed_exp = _expansion_signed_moment(poly, rvs, int(q))
        if abs(signed_grid - signed_exp) > 1e-9 * (1.0 + abs(signed_grid) + abs(signed_exp)):
            raise AssertionError("grid and expansion moment routes disagree")
    return float(w @ np.abs(vals) ** q)


def signed_moment(poly: MultilinearPoly, rvs, k: int) -> float:
    """E[f^k] for integer k, grid route cross-checked by expansion when small."""
    if k < 1 or int(k) != k:
        raise ValueError("signed moments need a positive integer exponent")
    vals = grid_values(poly, rvs)
    out = float(grid_weights(rvs) @ vals ** int(k))
    if k <= 4 and (k + 1) ** poly.n <= MAX_EXPANSION_KEYS:
        other = _expansion_signed_moment(poly, rvs, int(k))
        if abs(out - other) > 1e-9 * (1.0 + abs(out) + abs(other)):
            raise AssertionError("grid and expansion moment routes disagree")
    return out


# ---------------------------------------------------------------------------
# influences in the random-variable setting
# ---------------------------------------------------------------------------

def _sigma_product(rvs, S: int) -> float:
    out = 1.0
    for i in range(len(rvs)):
        if (S >> i) & 1:
            if rvs[i].sigma is None:
                raise ValueError(
                    f"variable {i} has no declared sigma; pass one to use it "
                    "in influence or moment-condition roles")
            out *= rvs[i].sigma
    return out


def rv_influence(poly: MultilinearPoly, rvs, S: int) -> float:
    """I_S[f] = sigma_S^{-2} ||D_S f||_2^2 = prod_{i in S} sigma_i^{-2}
    sum_{J >= S} a_J^2, cross-checked against the exact second moment of
    D_S f when the grid is small."""
    _check_arity(poly, rvs)
    if not 0 <= S < (1 << poly.n):
        raise ValueError("S must be a subset mask of the coordinates")
    sig = _sigma_product(rvs, S)
    spectral = float(poly.w_upsets()[S]) / sig ** 2
    if _grid_points(rvs) <= 100_000:
        for i in range(poly.n):
            if not rvs[i].is_standard():
                raise ValueError(f"variable {i} must have mean 0 and variance 1")
        direct = exact_expectation(poly.derivative(S), rvs, moment=2.0) / sig ** 2
        if abs(spectral - direct) > 1e-10 * (1.0 + abs(spectral) + abs(direct)):
            raise AssertionError("spectral and direct influence routes disagree")
    return spectral


# ---------------------------------------------------------------------------
# general-q hypercontractivity
# ---------------------------------------------------------------------------

def _validate_q_condition(rvs, q: float, tol: float) -> list:
    sigmas = []
    for i, z in enumerate(rvs):
        if not z.is_standard(1e-12):
            raise ValueError(f"variable {i} must have mean 0 and variance 1")
        if z.sigma is None:
            raise ValueError(f"variable {i} needs a declared sigma for the "
                             "moment condition")
        measured = z.abs_moment(q)
        bound = z.sigma ** (2.0 - q)
        if measured > bound + tol * (1.0 + measured + bound):
            raise ValueError(
                f"moment condition fails at variable {i}: E|Z|^{q} = {measured} "
                f"> sigma^(2-q) = {bound}")
        sigmas.append(z.sigma)
    return sigmas


def verify_q_moment(poly: MultilinearPoly, rvs, q: float, rho: float,
                    tol: float = DEFAULT_TOL) -> dict:
    """The three general-q bounds at noise rate rho <= (2q)^{-1.5}:

      uniform sigma:    ||T_rho f||_q^q <= sum_S sigma^{(2-q)|S|} ||D_S f||_2^q
      per-coordinate:   ||T_rho f||_q^q <= sum_S sigma_S^{2-q}    ||D_S f||_2^q
      beta norm:        ||T_rho f||_q   <= beta^{(q-2)/2q} ||f||_2

    plus the single-variable inequality
      ||e + rho d Z||_q^q <= (|e+d|^q + |e-d|^q)/2 + sigma^{2-q} |d|^q
    on a 9x9 grid of (e, d) in [-2, 2]^2 for every variable (its hypothesis
    rho < 1/(2q) is implied by the rho bound above).
    """
    _check_arity(poly, rvs)
    if q <= 2.0:
        raise ValueError("the q-norm bounds need q > 2")
    rho_max = (2.0 * q) ** -1.5
    if not 0.0 < rho <= rho_max + 1e-15:
        raise ValueError(f"q = {q} needs 0 < rho <= (2q)^-1.5 = {rho_max:.6g}")
    sigmas = _validate_q_condition(rvs, q, tol)
    sig_min = min(sigmas)

    zsum = poly.w_upsets()
    pc = popcounts(poly.n).astype(np.float64)
    lhs_qq = exact_expectation(poly.noised(rho), rvs, moment=q)

    sig_prod = np.ones(1 << poly.n)
    for i, s in enumerate(sigmas):
        blk = sig_prod.reshape(-1, 2, 1 << i)
        blk[:, 1, :] *= s

    rhs_uniform = float(np.sum(sig_min ** ((2.0 - q) * pc) * zsum ** (q / 2.0)))
    rhs_coord = float(np.sum(sig_prod ** (2.0 - q) * zsum ** (q / 2.0)))

    norm2sq = float(zsum[0])
    bounds = {
        "uniform_sigma": {"lhs": lhs_qq, "rhs": rhs_uniform,
                          "holds": leq_slack(lhs_qq, rhs_uniform, tol)},
        "per_coordinate": {"lhs": lhs_qq, "rhs": rhs_coord,
                           "holds": leq_slack(lhs_qq, rhs_coord, tol)},
    }
    if norm2sq > 0.0:
        beta = float(np.max(zsum / sig_prod ** 2)) / norm2sq
        lhs_norm = lhs_qq ** (1.0 / q)
        rhs_norm = beta ** ((q - 2.0) / (2.0 * q)) * math.sqrt(norm2sq)
        bounds["beta_norm"] = {"lhs": lhs_norm, "rhs": rhs_norm,
                               "holds": leq_slack(lhs_norm, rhs_norm, tol)}
    else:
        bounds["beta_norm"] = {"lhs": 0.0, "rhs": 0.0, "holds": True}

    grid = np.linspace(-2.0, 2.0, 9)
    n1_holds, n1_points = True, 0
    for i, z in enumerate(rvs):
        for e in grid:
            for d in grid:
                shifted = MultilinearPoly(1, np.array([e, rho * d]))
                lhs1 = exact_expectation(shifted, [z], moment=q)
                rhs1 = 0.5 * (abs(e + d) ** q + abs(e - d) ** q) \
                    + z.sigma ** (2.0 - q) * abs(d) ** q
                n1_points += 1
                if not leq_slack(lhs1, rhs1, tol):
                    n1_holds = False
    report = {
        "q": q,
        "rho": rho,
        "bounds": bounds,
        "n1_grid": {"points": n1_points, "holds": n1_holds},
        "passed": n1_holds and all(b["holds"] for b in bounds.values()),
    }
    return report


# ---------------------------------------------------------------------------
# invariance principle
# ---------------------------------------------------------------------------

def invariance_gap(poly: MultilinearPoly, xs, ys, test: SmoothTest,
                   tol: float = DEFAULT_TOL) -> dict:
    """|E[phi(f(X))] - E[phi(f(Y))]| against the influence bound.

    sigma_i is taken as tight as the hypotheses allow,
    1 / max(E|X_i|^3, E|Y_i|^3), and epsilon is the largest nonempty-set
    influence under those sigmas. The assertion uses the proof's constant
    2^{12d}; the display constant 2^{5d} is reported as a margin only. The
    coordinate-replacement telescope is checked step by step: the gaps sum
    to the total and each obeys its third-moment Taylor bound.
    """
    _check_arity(poly, xs)
    _check_arity(poly, ys)
    for name, rvs in (("X", xs), ("Y", ys)):
        for i, z in enumerate(rvs):
            if not z.is_standard(1e-12):
                raise ValueError(f"{name}_{i} must have mean 0 and variance 1")

    n = poly.n
    sigmas = [1.0 / max(xs[i].abs_moment(3.0), ys[i].abs_moment(3.0))
              for i in range(n)]
    w_up = poly.w_upsets()
    eps = 0.0
    for S in range(1, 1 << n):
        sig2 = 1.0
        for i in range(n):
            if (S >> i) & 1:
                sig2 *= sigmas[i] ** 2
        eps = max(eps, float(w_up[S]) / sig2)

    d = poly.degree
    w0 = poly.w_empty()
    phi = test.phi

    hybrids = [list(ys[:t]) + list(xs[t:]) for t in range(n + 1)]
    values = [exact_expectation(poly, h, test=phi) for h in hybrids]
    lhs = abs(values[0] - values[-1])
    rhs_12 = 2.0 ** (12 * d) * test.m3 * w0 * math.sqrt(eps)
    rhs_5 = 2.0 ** (5 * d) * test.m3 * w0 * math.sqrt(eps)

    gaps = [values[t - 1] - values[t] for t in range(1, n + 1)]
    total = values[0] - values[-1]
    telescoped = abs(sum(gaps) - total) <= 1e-9 * (1.0 + abs(total))

    steps = []
    for t in range(1, n + 1):
        delta = poly.derivative(1 << (t - 1))
        third = exact_expectation(delta, hybrids[t - 1], moment=3.0)
        bound = test.m3 * third / (3.0 * sigmas[t - 1])
        steps.append({"t": t, "gap": gaps[t - 1], "bound": bound,
                      "holds": leq_slack(abs(gaps[t - 1]), bound, tol)})

    passed = leq_slack(lhs, rhs_12, tol) and telescoped \
        and all(s["holds"] for s in steps)
    return {
        "lhs": lhs,
        "rhs": rhs_12,
        "rhs_display": rhs_5,
        "holds": leq_slack(lhs, rhs_12, tol),
        "holds_display": leq_slack(lhs, rhs_5, tol),
        "epsilon": eps,
        "w_empty": w0,
        "degree": d,
        "telescoping": {"gaps": gaps, "sum": float(sum(gaps)), "total": total,
                        "consistent": telescoped},
        "steps": steps,
        "passed": passed,
    }


# ---------------------------------------------------------------------------
# Hamming balls and the stability exploration
# ---------------------------------------------------------------------------

def hamming_ball(n: int, p: float, alpha: float) -> BiasedFunction:
    """The threshold function 1[#ones >= t] whose measure is closest to
    alpha; on a tie the smaller t (larger set) wins."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    bias = Bias(p)
    best_t, best_err = 0, float("inf")
    for t in range(n + 2):
        mu = sum(math.comb(n, k) * p ** k * (1.0 - p) ** (n - k)
                 for k in range(t, n + 1))
        err = abs(mu - alpha)
        if err < best_err - 1e-15:
            best_t, best_err = t, err
    vals = (popcounts(n) >= best_t).astype(np.float64)
    return BiasedFunction(n, bias, vals)


def majority_stablest_report(f: BiasedFunction, rho: float) -> dict:
    """Exploratory only: noise stability of f next to the Hamming ball of
    the same measure. No verdict; the comparison theorem's constants are
    not explicit."""
    from .noise_ops import noise_stability

    ball = hamming_ball(f.n, f.bias.p, f.expectation())
    return {
        "rho": rho,
        "mu": f.expectation(),
        "stability": noise_stability(f, rho),
        "ball_mu": ball.expectation(),
        "ball_stability": noise_stability(ball, rho),
    }
