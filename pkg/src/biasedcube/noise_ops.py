"""Noise operators on the biased cube.

Covers the symmetric operator T_rho (keep each coordinate with probability rho,
else resample from mu_p), the directed operators between two biases p < q built
from the monotone coupling, and the mixed-bias hybrid operators used by the
coordinate-replacement argument for fourth-moment hypercontractivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cube_core import (
    DEFAULT_TOL,
    Bias,
    BiasedFunction,
    Spectrum,
    _sweep_inverse,
    bits,
    from_spectrum,
    leq_slack,
    popcounts,
    transform,
    weights,
)

# largest rho for which the replacement step is valid: 2*rho <= 1/sqrt(3)
REPLACEMENT_RHO_MAX = 1.0 / (2.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class NoiseParams:
    """Correlation rho, plus the mixed-operator knobs rho_prime and t."""

    rho: float
    rho_prime: Optional[float] = None
    t: int = 0

    def __post_init__(self):
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.rho_prime is not None and not (0.0 <= self.rho_prime <= 1.0):
            raise ValueError(f"rho_prime must lie in [0, 1], got {self.rho_prime}")
        if self.t < 0:
            raise ValueError("interpolation index t must be >= 0")


@dataclass(frozen=True)
class DirectedParams:
    """Bias pair 0 < p < q < 1 for the monotone coupling D(p, q)."""

    p: float
    q: float

    def __post_init__(self):
        if not (0.0 < self.p < self.q < 1.0):
            raise ValueError(f"need 0 < p < q < 1, got p={self.p}, q={self.q}")

    @property
    def rho(self) -> float:
        """Correlation of the up-then-down composition: p(1-q) / (q(1-p))."""
        return self.p * (1.0 - self.q) / (self.q * (1.0 - self.p))


# ---------------------------------------------------------------------------
# symmetric noise
# ---------------------------------------------------------------------------

def _noise_value_route(values: np.ndarray, n: int, p: float, rho: float) -> np.ndarray:
    out = np.array(values, dtype=np.float64)
    for i in range(n):
        blk = out.reshape(-1, 2, 1 << i)
        lo = blk[:, 0, :].copy()
        hi = blk[:, 1, :].copy()
        mean = (1.0 - p) * lo + p * hi
        blk[:, 0, :] = rho * lo + (1.0 - rho) * mean
        blk[:, 1, :] = rho * hi + (1.0 - rho) * mean
    return out


def noise_apply(f: BiasedFunction, rho: float) -> BiasedFunction:
    """T_rho f, computed spectrally and by value-space averaging; the two
    routes are asserted to agree before the spectral result is returned."""
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    spec = transform(f)
    mult = np.power(float(rho), popcounts(f.n).astype(np.float64))
    spectral = from_spectrum(f.n, f.bias, spec.coeffs * mult)
    direct = _noise_value_route(f.values, f.n, f.bias.p, rho)
    scale = 1.0 + float(np.max(np.abs(spectral.values))) + float(np.max(np.abs(direct)))
    if float(np.max(np.abs(spectral.values - direct))) > 1e-10 * scale:
        raise AssertionError("spectral and value-space noise routes disagree")
    return spectral


def noise_stability(f: BiasedFunction, rho: float) -> float:
    """Stab_rho(f) = <f, T_rho f> = sum_S rho^{|S|} fhat(S)^2."""
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    c = transform(f).coeffs
    mult = np.power(float(rho), popcounts(f.n).astype(np.float64))
    return float(np.sum(mult * c * c))


# ---------------------------------------------------------------------------
# directed noise between two biases
# ---------------------------------------------------------------------------

def _bias_matches(b: Bias, p: float) -> bool:
    return abs(b.p - p) <= 1e-12


def directed_noise_apply(f: BiasedFunction, dp: DirectedParams, direction: str) -> BiasedFunction:
    """Conditional-expectation operators of the monotone coupling x <= y.

    up:   input at bias p, output (T^{p->q} f)(y) = E[f(x) | y] at bias q;
          given y_i=1, x_i=1 w.p. p/q; given y_i=0, x_i=0 surely.
    down: input at bias q, output (T^{q->p} g)(x) = E[g(y) | x] at bias p;
          given x_i=1, y_i=1 surely; given x_i=0, y_i=1 w.p. (q-p)/(1-p).
    Matrix-free: one 2x2 conditional sweep per coordinate.
    """
    p, q = dp.p, dp.q
    if direction == "up":
        if not _bias_matches(f.bias, p):
            raise ValueError("upward operator expects input at bias p")
        out = np.array(f.values)
        a = p / q
        for i in range(f.n):
            blk = out.reshape(-1, 2, 1 << i)
            lo = blk[:, 0, :].copy()
            blk[:, 1, :] = a * blk[:, 1, :] + (1.0 - a) * lo
        return BiasedFunction(f.n, Bias(q), out)
    if direction == "down":
        if not _bias_matches(f.bias, q):
            raise ValueError("downward operator expects input at bias q")
        out = np.array(f.values)
        a = (q - p) / (1.0 - p)
        for i in range(f.n):
            blk = out.reshape(-1, 2, 1 << i)
            hi = blk[:, 1, :].copy()
            blk[:, 0, :] = a * hi + (1.0 - a) * blk[:, 0, :]
        return BiasedFunction(f.n, Bias(p), out)
    raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


def directed_inner(f: BiasedFunction, dp: DirectedParams) -> float:
    """<f, T^{p->q} f> under mu_q, for f given at bias p; equals mu_p(f) when f
    is monotone Boolean, and never exceeds it for Boolean f."""
    up = directed_noise_apply(f, dp, "up")
    wq = weights(f.n, dp.q)
    return float(wq @ (f.values * up.values))


def _coupling_matrix(dp: DirectedParams, n: int, direction: str) -> np.ndarray:
    """Dense 2^n x 2^n operator matrix; for the small-n composition identity only."""
    if n > 8:
        raise ValueError("dense operator matrices are capped at n <= 8")
    p, q = dp.p, dp.q
    if direction == "up":
        m = np.array([[1.0, 0.0], [1.0 - p / q, p / q]])  # rows y_i, cols x_i
    elif direction == "down":
        a = (q - p) / (1.0 - p)
        m = np.array([[1.0 - a, a], [0.0, 1.0]])  # rows x_i, cols y_i
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(m, out)
    return out


def noise_matrix(n: int, p: float, rho: float) -> np.ndarray:
    """Dense matrix of T_rho at bias p (small n only): rows x, cols y."""
    if n > 8:
        raise ValueError("dense operator matrices are capped at n <= 8")
    m = np.array([
        [rho + (1.0 - rho) * (1.0 - p), (1.0 - rho) * p],
        [(1.0 - rho) * (1.0 - p), rho + (1.0 - rho) * p],
    ])
    out = np.array([[1.0]])
    for _ in range(n):
        out = np.kron(m, out)
    return out


def composition_gap(dp: DirectedParams, n: int) -> float:
    """Entrywise gap between T^{q->p} T^{p->q} and T_rho at bias p, rho = dp.rho."""
    up = _coupling_matrix(dp, n, "up")
    down = _coupling_matrix(dp, n, "down")
    return float(np.max(np.abs(down @ up - noise_matrix(n, dp.p, dp.rho))))


# ---------------------------------------------------------------------------
# mixed-bias hybrids for the replacement method
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixedFunction:
    """Function on a cube whose coordinates carry individual biases."""

    n: int
    ps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ps = np.asarray(self.ps, dtype=np.float64)
        if ps.shape != (self.n,) or np.any(ps <= 0.0) or np.any(ps >= 1.0):
            raise ValueError("per-coordinate biases must lie strictly in (0, 1)")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n,):
            raise ValueError("table length must be 2^n")
        ps = ps.copy()
        vals = vals.copy()
        ps.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "values", vals)

    def weights(self) -> np.ndarray:
        w = np.ones(1 << self.n)
        for i in range(self.n):
            blk = w.reshape(-1, 2, 1 << i)
            blk[:, 0, :] *= 1.0 - self.ps[i]
            blk[:, 1, :] *= self.ps[i]
        return w

    def moment(self, r: float) -> float:
        return float(self.weights() @ np.abs(self.values) ** r)


def hybrid_biases(n: int, p: float, t: int) -> np.ndarray:
    """Bias vector of the t-th hybrid: uniform on the first t coordinates,
    p-biased on the rest."""
    if not (0 <= t <= n):
        raise ValueError("hybrid index t must lie in 0..n")
    ps = np.full(n, p)
    ps[:t] = 0.5
    return ps


def hybrid_function(coeffs: np.ndarray, n: int, p: float, t: int) -> MixedFunction:
    """f_t: same character coefficients, first t characters replaced by uniform ones."""
    ps = hybrid_biases(n, p, t)
    return MixedFunction(n, ps, _sweep_inverse(np.asarray(coeffs, dtype=np.float64), ps))


def mixed_from_spectrum(coeffs: np.ndarray, ps: np.ndarray) -> MixedFunction:
    """Synthesize a function from coefficients over per-coordinate biased characters."""
    ps = np.asarray(ps, dtype=np.float64)
    n = ps.shape[0]
    return MixedFunction(n, ps, _sweep_inverse(np.asarray(coeffs, dtype=np.float64), ps))


def _mixed_multiplier(n: int, t: int, rho_uniform: float, rho_biased: float) -> np.ndarray:
    """Spectral multiplier of T^t_{rho', rho}: rho'^{|S & [t]|} rho^{|S \\ [t]|}."""
    masks = np.arange(1 << n, dtype=np.int64)
    pc = popcounts(n)
    low = pc[masks & ((1 << t) - 1)]
    high = pc - low
    return np.power(float(rho_uniform), low.astype(np.float64)) * \
        np.power(float(rho_biased), high.astype(np.float64))


def _hybrid_fourth_moment(coeffs: np.ndarray, n: int, p: float, t: int,
                          rho_uniform: float, rho_biased: float) -> float:
    """E[(T^t_{rho', rho} g)^4] on the t-th hybrid measure, for g given by coeffs."""
    mult = _mixed_multiplier(n, t, rho_uniform, rho_biased)
    g = hybrid_function(coeffs * mult, n, p, t)
    return g.moment(4.0)


def replacement_step_check(f: BiasedFunction, rho: float, t: int,
                           tol: float = DEFAULT_TOL) -> dict:
    """Single replacement step plus the fully telescoped fourth-moment bound.

    Step t swaps the t-th coordinate (1-based) from p-biased to uniform:
      E[(T^{t-1}_{2rho,rho} f_{t-1})^4]
        <= E[(T^t_{2rho,rho} f_t)^4] + 3 lam rho^4 E[(T^t_{2rho,rho} (D_t f)_t)^4].
    The telescoped form at i=0 is asserted too:
      ||T_rho f||_4^4 <= sum_S (3 lam rho^4)^{|S|} ||T_{2rho} (D_S f)_n||_4^4,
    with every (D_S f)_n living on the uniform cube.
    """
    if not (1 <= t <= f.n):
        raise ValueError(f"t must lie in 1..{f.n}, got {t}")
    if not (0.0 < rho <= REPLACEMENT_RHO_MAX + 1e-15):
        raise ValueError(f"rho must lie in (0, 1/(2 sqrt 3)], got {rho}")
    n, p = f.n, f.bias.p
    lam = f.bias.lam
    coeffs = transform(f).coeffs

    lhs = _hybrid_fourth_moment(coeffs, n, p, t - 1, 2.0 * rho, rho)
    rhs_main = _hybrid_fourth_moment(coeffs, n, p, t, 2.0 * rho, rho)

    # (D_t f)_t: drop coordinate t from every character containing it
    bit = 1 << (t - 1)
    masks = np.arange(1 << n, dtype=np.int64)
    dcoeffs = np.where((masks & bit) == 0, coeffs[masks | bit], 0.0)
    dterm = _hybrid_fourth_moment(dcoeffs, n, p, t, 2.0 * rho, rho)

    rhs = rhs_main + 3.0 * lam * rho ** 4 * dterm
    step_holds = leq_slack(lhs, rhs, tol)

    tele_lhs = _hybrid_fourth_moment(coeffs, n, p, 0, 2.0 * rho, rho)
    tele_rhs = 0.0
    uniform = np.full(n, 0.5)
    wu = 1.0 / float(1 << n)
    pc = popcounts(n)
    for S in range(1 << n):
        dc = np.where((masks & S) == 0, coeffs[masks | S], 0.0)
        dc = dc * np.power(2.0 * rho, pc.astype(np.float64))
        vals = _sweep_inverse(dc, uniform)
        tele_rhs += (3.0 * lam * rho ** 4) ** int(pc[S]) * wu * float(np.sum(vals ** 4))
    tele_holds = leq_slack(tele_lhs, tele_rhs, tol)

    return {
        "t": t,
        "rho": rho,
        "step": {
            "lhs": lhs,
            "rhs_main": rhs_main,
            "derivative_term": dterm,
            "rhs": rhs,
            "holds": step_holds,
            "slack": rhs - lhs,
        },
        "telescoped": {
            "lhs": tele_lhs,
            "rhs": tele_rhs,
            "holds": tele_holds,
        },
        "passed": bool(step_holds and tele_holds),
    }
