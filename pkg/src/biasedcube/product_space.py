"""Finite product probability spaces and their orthogonal decomposition.

Tables are dense over the product of supports in mixed-radix order: the
point (x_0, ..., x_{k-1}) sits at index sum_t x_t * stride_t with
stride_t = m_0 * ... * m_{t-1}, so factor 0 varies fastest. With all
supports binary this coincides with the bitmask layout of cube_core.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cube_core import DEFAULT_TOL, leq_slack, popcounts, superset_sums
from .noise_ops import mixed_from_spectrum

MAX_POINTS = 2_000_000
MAX_PIECE_STORAGE = 33_554_432  # pieces array, 2^k tables of N points
ES_RHO_MAX = {4: 1.0 / 64.0, 6: 1.0 / (8.0 * 6.0 ** 1.5), 8: 1.0 / (8.0 * 8.0 ** 1.5)}


@dataclass(frozen=True, eq=False)
class Factor:
    """One coordinate: a finite support of size m with atom probabilities."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64).copy()
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise ValueError("a factor needs a support of size >= 2")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
            raise ValueError("factor atoms must be positive")
        if abs(float(arr.sum()) - 1.0) > 1e-12:
            raise ValueError("factor probabilities must sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def m(self) -> int:
        return int(self.probs.shape[0])

    @property
    def p(self) -> float:
        """Smallest atom."""
        return float(self.probs.min())

    @property
    def sigma(self) -> float:
        p = self.p
        return math.sqrt(p * (1.0 - p))


@dataclass(frozen=True, eq=False)
class ProductSpace:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a product space needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))
        for t, fac in enumerate(self.factors):
            # the smallest atom can reach 1/2 only for a uniform binary factor
            if fac.p >= 0.5:
                warnings.warn(
                    f"factor {t} has smallest atom {fac.p}; analyses assume "
                    "min atoms below 1/2", stacklevel=2)

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def sizes(self) -> tuple:
        return tuple(f.m for f in self.factors)

    @property
    def npoints(self) -> int:
        out = 1
        for f in self.factors:
            out *= f.m
        return out

    def stride(self, t: int) -> int:
        out = 1
        for u in range(t):
            out *= self.factors[u].m
        return out

    def weights(self) -> np.ndarray:
        # factor 0 varies fastest: each new factor becomes the slow axis
        w = np.ones(1)
        for f in self.factors:
            w = (f.probs[:, None] * w[None, :]).reshape(-1)
        w.setflags(write=False)
        return w

    def sigma_products(self) -> np.ndarray:
        """sigma_S = prod_{t in S} sigma_t for every subset mask S."""
        out = np.ones(1 << self.k)
        for t, f in enumerate(self.factors):
            blk = out.reshape(-1, 2, 1 << t)
            blk[:, 1, :] *= f.sigma
        return out


def _as_product_table(values, space: ProductSpace) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (space.npoints,):
        raise ValueError(f"table must have {space.npoints} entries, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("table entries must be finite")
    return arr.copy()


def _average_factor(vals: np.ndarray, space: ProductSpace, t: int) -> np.ndarray:
    """E_t: replace coordinate t by its mean; output constant along t."""
    fac = space.factors[t]
    blk = vals.reshape(-1, fac.m, space.stride(t))
    mean = np.einsum("ams,m->as", blk, fac.probs)
    out = np.repeat(mean[:, None, :], fac.m, axis=1)
    return out.reshape(-1)


@dataclass(frozen=True, eq=False)
class ESComponents:
    """All 2^k orthogonal pieces, stacked as rows indexed by subset mask."""

    base: ProductSpace
    pieces: np.ndarray

    def piece(self, S: int) -> np.ndarray:
        return self.pieces[S]

    def norms_sq(self) -> np.ndarray:
        w = self.base.weights()
        return (self.pieces * self.pieces) @ w

    def reconstruct(self) -> np.ndarray:
        return self.pieces.sum(axis=0)


def efron_stein(values, space: ProductSpace, tol: float = 1e-10) -> ESComponents:
    """Orthogonal decomposition f = sum_S f^{=S}.

    Conditional expectations f^{c J} = E_{J-bar} f come from per-factor
    averaging sweeps shared along a lattice walk; the pieces are their
    signed subset sums. Reconstruction, measurability, orthogonality and
    Parseval are asserted before returning.
    """
    f = _as_product_table(values, space)
    k, N = space.k, space.npoints
    if N > MAX_POINTS:
        raise ValueError(f"product table has {N} points; cap is {MAX_POINTS}")
    if (1 << k) * N > MAX_PIECE_STORAGE:
        raise ValueError("piece storage cap exceeded")

    sub = np.empty((1 << k, N))
    sub[(1 << k) - 1] = f
    for J in range((1 << k) - 2, -1, -1):
        t = next(i for i in range(k) if not (J >> i) & 1)
        sub[J] = _average_factor(sub[J | (1 << t)], space, t)

    pieces = sub  # overwrite in place with the signed subset sums
    for t in range(k):
        blk = pieces.reshape(-1, 2, 1 << t, N)
        blk[:, 1, :, :] -= blk[:, 0, :, :]
    pieces = pieces.reshape(1 << k, N)

    w = space.weights()
    scale = 1.0 + float(np.max(np.abs(f)))
    if float(np.max(np.abs(pieces.sum(axis=0) - f))) > tol * scale:
        raise AssertionError("pieces do not reconstruct the function")
    for S in range(1 << k):
        proj = pieces[S]
        for t in range(k):
            if not (S >> t) & 1:
                if float(np.max(np.abs(_average_factor(proj, space, t) - proj))) > tol * scale:
                    raise AssertionError(f"piece {S} depends on a coordinate outside S")

    gram = (pieces * w) @ pieces.T
    total = float(f @ (w * f))
    gscale = 1.0 + float(np.max(np.abs(gram))) + abs(total)
    off = gram - np.diag(np.diag(gram))
    if float(np.max(np.abs(off))) > tol * gscale:
        raise AssertionError("pieces are not pairwise orthogonal")
    if abs(float(np.trace(gram)) - total) > tol * gscale:
        raise AssertionError("piece norms do not satisfy Parseval")

    pieces.setflags(write=False)
    return ESComponents(space, pieces)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _resampling_noise(values: np.ndarray, space: ProductSpace, rho: float) -> np.ndarray:
    # per-factor transition rho*I + (1-rho) * ones nu^T, applied as sweeps
    out = np.array(values)
    for t, fac in enumerate(space.factors):
        blk = out.reshape(-1, fac.m, space.stride(t))
        mean = np.einsum("ams,m->as", blk, fac.probs)
        out = (rho * blk + (1.0 - rho) * mean[:, None, :]).reshape(-1)
    return out


def es_apply(comp: ESComponents, kind: str, S: int = 0, rho: float | None = None,
             tol: float = 1e-10) -> np.ndarray:
    """Apply L_S (kind="laplacian") or T_rho (kind="noise") from the pieces.

    The noise route is cross-checked against the per-factor resampling
    construction whenever the space has at most 4 factors.
    """
    space = comp.base
    k = space.k
    if kind == "laplacian":
        if not 0 <= S < (1 << k):
            raise ValueError("S must be a subset mask of the factors")
        sel = [T for T in range(1 << k) if (T & S) == S]
        return comp.pieces[sel].sum(axis=0)
    if kind == "noise":
        if rho is None or not (0.0 <= rho <= 1.0):
            raise ValueError("noise needs rho in [0, 1]")
        mult = np.power(float(rho), popcounts(k).astype(np.float64))
        out = mult @ comp.pieces
        if k <= 4:
            direct = _resampling_noise(comp.reconstruct(), space, rho)
            scale = 1.0 + float(np.max(np.abs(out))) + float(np.max(np.abs(direct)))
            if float(np.max(np.abs(out - direct))) > tol * scale:
                raise AssertionError("spectral and resampling noise routes disagree")
        return out
    raise ValueError(f"unknown operator kind: {kind}")


# ---------------------------------------------------------------------------
# hypercontractivity over product spaces
# ---------------------------------------------------------------------------

def verify_es_hc(values, space: ProductSpace, q: int, rho: float,
                 tol: float = DEFAULT_TOL) -> dict:
    """||T_rho f||_q^q <= sum_S sigma_S^{2-q} ||L_S f||_2^q for even q and
    rho <= 1/(8 q^{1.5})."""
    if q not in ES_RHO_MAX:
        raise ValueError(f"only even q in {sorted(ES_RHO_MAX)} are supported, got {q}")
    if not 0.0 < rho <= ES_RHO_MAX[q] + 1e-15:
        raise ValueError(f"q = {q} needs 0 < rho <= 1/(8 q^1.5) = {ES_RHO_MAX[q]:.6g}")
    comp = efron_stein(values, space)
    w = space.weights()

    noisy = es_apply(comp, "noise", rho=rho)
    lhs = float(w @ np.abs(noisy) ** q)

    # ||L_S f||_2^2 is the superset sum of piece norms by orthogonality
    lap_norms_sq = superset_sums(comp.norms_sq(), space.k)
    sig = space.sigma_products()
    rhs = float(np.sum(sig ** (2.0 - q) * lap_norms_sq ** (q / 2.0)))
    return {
        "q": q,
        "rho": rho,
        "lhs": lhs,
        "rhs": rhs,
        "passed": leq_slack(lhs, rhs, tol),
    }


def piece_product_checks(values, space: ProductSpace, qs: tuple = (3, 4),
                         tol: float = 1e-10) -> dict:
    """Exhaustive check that E[prod_i f^{=S_i}] = 0 (and the matching
    character product vanishes) whenever some coordinate lies in exactly one
    of the S_i. Feasible only for small spaces."""
    k = space.k
    if k > 3:
        raise ValueError("exhaustive tuple check is limited to <= 3 factors")
    comp = efron_stein(values, space)
    w = space.weights()
    chi_moments = _quarter_bias_moments(space, max(qs))

    counts = {}
    for q in qs:
        zero_terms = checked = 0
        for combo in np.ndindex(*((1 << k,) * q)):
            cover = [0] * k
            for S in combo:
                for t in range(k):
                    if (S >> t) & 1:
                        cover[t] += 1
            if 1 not in cover:
                continue
            checked += 1
            prod = np.ones(space.npoints)
            for S in combo:
                prod = prod * comp.pieces[S]
            val = float(w @ prod)
            scale = 1.0 + max(abs(float(w @ (comp.pieces[S] ** 2))) for S in combo)
            if abs(val) > tol * scale:
                raise AssertionError(
                    f"E[prod f^=S] = {val} for {combo} with a singly-covered coordinate")
            chi = 1.0
            for t, c in enumerate(cover):
                chi *= chi_moments[t][c]
            if abs(chi) > tol:
                raise AssertionError("character product fails to vanish")
            zero_terms += 1
        counts[q] = {"checked": checked, "zero": zero_terms}
    return counts


def _quarter_bias_moments(space: ProductSpace, qmax: int) -> list:
    """chi_moments[t][j] = E[chi_t^j] for the (p_t/4)-biased character."""
    out = []
    for fac in space.factors:
        pq = fac.p / 4.0
        s = math.sqrt(pq * (1.0 - pq))
        lo, hi = -pq / s, (1.0 - pq) / s
        row = [(1.0 - pq) * lo ** j + pq * hi ** j for j in range(qmax + 1)]
        out.append(row)
    return out


def reduction_check(values, space: ProductSpace, q: int = 4,
                    tol: float = DEFAULT_TOL) -> dict:
    """||g||_q <= ||g-tilde||_q where g-tilde puts the piece 2-norms on
    (p_t/4)-biased characters.

    The character moment hypothesis E[chi_t^j] >= sigma_t^{2-j} for integer
    j in (2, q] is asserted before the comparison.
    """
    if q < 3 or int(q) != q:
        raise ValueError("reduction check needs an integer q >= 3")
    moments = _quarter_bias_moments(space, q)
    for t, fac in enumerate(space.factors):
        for j in range(3, q + 1):
            if moments[t][j] < fac.sigma ** (2 - j) - 1e-12:
                raise AssertionError(
                    f"character moment hypothesis fails at factor {t}, power {j}")

    comp = efron_stein(values, space)
    w = space.weights()
    f = comp.reconstruct()
    lhs = float(w @ np.abs(f) ** q) ** (1.0 / q)

    coeffs = np.sqrt(comp.norms_sq())
    ps = np.array([fac.p / 4.0 for fac in space.factors])
    tilde = mixed_from_spectrum(coeffs, ps)
    rhs = tilde.moment(float(q)) ** (1.0 / q)
    return {"q": q, "lhs": lhs, "rhs": rhs, "passed": leq_slack(lhs, rhs, tol)}
