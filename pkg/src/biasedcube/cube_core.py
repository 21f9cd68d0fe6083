"""Dense functions on the p-biased Boolean cube.

A function on {0,1}^n is a table of 2^n doubles indexed by bitmask; bit i of the
mask is coordinate i. The measure is the product Bernoulli(p) measure mu_p, and
the orthonormal character basis is chi_S(x) = prod_{i in S} (x_i - p) / sigma
with sigma = sqrt(p (1 - p)). Spectra are tables in the same mask order:
coeffs[S] is the coefficient of chi_S.

All tables are float64 and read-only once constructed; every operation returns a
new object. Dense tables are capped at n <= 24.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_TOL = 1e-9
MAX_DENSE_N = 24


# ---------------------------------------------------------------------------
# numeric conventions
# ---------------------------------------------------------------------------

def rel_close(a: float, b: float, tol: float = DEFAULT_TOL) -> bool:
    """Scale-aware identity check: |a - b| <= tol * (1 + |a| + |b|)."""
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def leq_slack(lhs: float, rhs: float, tol: float = DEFAULT_TOL) -> bool:
    """Inequality with scale-aware slack: lhs <= rhs + tol * (1 + |lhs| + |rhs|)."""
    return lhs <= rhs + tol * (1.0 + abs(lhs) + abs(rhs))


def bits(mask: int):
    """Iterate the set bits of a mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Popcount of every mask 0 .. 2^n - 1, as a read-only int array."""
    masks = np.arange(1 << n, dtype=np.int64)
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc += (masks >> i) & 1
    pc.setflags(write=False)
    return pc


@lru_cache(maxsize=None)
def weights(n: int, p: float) -> np.ndarray:
    """mu_p mass of every mask: p^{|x|} (1-p)^{n-|x|}, read-only."""
    pc = popcounts(n)
    w = np.power(p, pc, dtype=np.float64) * np.power(1.0 - p, n - pc, dtype=np.float64)
    w.setflags(write=False)
    return w


# ---------------------------------------------------------------------------
# core types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bias:
    """Bernoulli bias p together with the derived constants used everywhere:
    sigma = sqrt(p(1-p)) and lam = E[chi^4] = ((1-p)^3 + p^3) / (p(1-p))."""

    p: float
    sigma: float = field(init=False, compare=False)
    lam: float = field(init=False, compare=False)

    def __post_init__(self):
        p = float(self.p)
        if not (0.0 < p < 1.0):
            raise ValueError(f"bias p must lie strictly in (0, 1), got {p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "sigma", math.sqrt(p * (1.0 - p)))
        object.__setattr__(self, "lam", ((1.0 - p) ** 3 + p ** 3) / (p * (1.0 - p)))


def _as_table(values, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (1 << n,):
        raise ValueError(f"table must have shape ({1 << n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("table entries must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_n(n: int) -> None:
    if not (0 <= n <= MAX_DENSE_N):
        raise ValueError(f"dense tables support 0 <= n <= {MAX_DENSE_N}, got {n}")


def _check_mask(S: int, n: int) -> None:
    if not (0 <= S < (1 << n)):
        raise ValueError(f"mask {S} out of range for n={n}")


@dataclass(frozen=True, eq=False)
class BiasedFunction:
    """Real-valued function on {0,1}^n under mu_p, stored densely."""

    n: int
    bias: Bias
    values: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "values", _as_table(self.values, self.n))

    @property
    def p(self) -> float:
        return self.bias.p

    def weights(self) -> np.ndarray:
        return weights(self.n, self.bias.p)

    def expectation(self) -> float:
        return float(self.weights() @ self.values)

    def inner(self, other: "BiasedFunction") -> float:
        if other.n != self.n or other.bias.p != self.bias.p:
            raise ValueError("inner product requires matching cube and bias")
        return float(self.weights() @ (self.values * other.values))

    def is_boolean(self, tol: float = DEFAULT_TOL) -> bool:
        v = self.values
        return bool(np.all(np.minimum(np.abs(v), np.abs(v - 1.0)) <= tol))

    def is_monotone(self) -> bool:
        """True iff setting any coordinate to 1 never decreases the value."""
        for i in range(self.n):
            blk = self.values.reshape(-1, 2, 1 << i)
            if np.any(blk[:, 1, :] < blk[:, 0, :]):
                return False
        return True


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Character coefficients of a function, in mask order."""

    n: int
    bias: Bias
    coeffs: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "coeffs", _as_table(self.coeffs, self.n))

    def degree(self, tol: float = 0.0) -> int:
        pc = popcounts(self.n)
        live = np.abs(self.coeffs) > tol
        return int(pc[live].max()) if np.any(live) else 0


@dataclass(frozen=True)
class Restriction:
    """Pin the coordinates of mask S to the bits of x; x must be a submask of S."""

    S: int
    x: int

    def __post_init__(self):
        if self.S < 0 or self.x < 0 or (self.x & ~self.S) != 0:
            raise ValueError("restriction assignment must be a submask of S")


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------

def _sweep_forward(values: np.ndarray, p_vec: np.ndarray) -> np.ndarray:
    """Butterfly per coordinate: (a, b) -> ((1-p) a + p b, sigma (b - a)).

    Accepts a per-coordinate bias vector so mixed-bias cubes reuse the same code.
    """
    out = np.array(values, dtype=np.float64)
    for i in range(p_vec.shape[0]):
        p = float(p_vec[i])
        s = math.sqrt(p * (1.0 - p))
        blk = out.reshape(-1, 2, 1 << i)
        a = blk[:, 0, :].copy()
        b = blk[:, 1, :]
        blk[:, 0, :] = (1.0 - p) * a + p * b
        blk[:, 1, :] = s * (b - a)
    return out


def _sweep_inverse(coeffs: np.ndarray, p_vec: np.ndarray) -> np.ndarray:
    """Exact inverse of _sweep_forward: a = c0 - p c1/sigma, b = c0 + (1-p) c1/sigma."""
    out = np.array(coeffs, dtype=np.float64)
    for i in range(p_vec.shape[0]):
        p = float(p_vec[i])
        s = math.sqrt(p * (1.0 - p))
        blk = out.reshape(-1, 2, 1 << i)
        c0 = blk[:, 0, :].copy()
        c1s = blk[:, 1, :] / s
        blk[:, 0, :] = c0 - p * c1s
        blk[:, 1, :] = c0 + (1.0 - p) * c1s
    return out


def transform(obj, direction: str = "forward"):
    """Character transform in O(n 2^n).

    direction="forward" maps a BiasedFunction to its Spectrum; "inverse" maps a
    Spectrum back to the function. The two are exact inverses up to rounding.
    """
    if direction == "forward":
        if not isinstance(obj, BiasedFunction):
            raise TypeError("forward transform expects a BiasedFunction")
        p_vec = np.full(obj.n, obj.bias.p)
        return Spectrum(obj.n, obj.bias, _sweep_forward(obj.values, p_vec))
    if direction == "inverse":
        if not isinstance(obj, Spectrum):
            raise TypeError("inverse transform expects a Spectrum")
        p_vec = np.full(obj.n, obj.bias.p)
        return BiasedFunction(obj.n, obj.bias, _sweep_inverse(obj.coeffs, p_vec))
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def from_spectrum(n: int, bias: Bias, coeffs) -> BiasedFunction:
    return transform(Spectrum(n, bias, coeffs), "inverse")


# ---------------------------------------------------------------------------
# norms and inner products
# ---------------------------------------------------------------------------

def biased_norm(f: BiasedFunction, r: float) -> float:
    """L^r norm under mu_p: E[|f|^r]^{1/r}. Requires r >= 1."""
    if r < 1.0:
        raise ValueError(f"norm exponent must be >= 1, got {r}")
    mom = float(f.weights() @ np.abs(f.values) ** r)
    return mom ** (1.0 / r)


def moment(f: BiasedFunction, r: float) -> float:
    """E[|f|^r] under mu_p (no root)."""
    return float(f.weights() @ np.abs(f.values) ** r)


# ---------------------------------------------------------------------------
# restriction and differential operators
# ---------------------------------------------------------------------------

def restrict(f: BiasedFunction, r: Restriction) -> BiasedFunction:
    """Pin the S coordinates to x; survivors are re-indexed in increasing order."""
    _check_mask(r.S, f.n)
    survivors = [i for i in range(f.n) if not (r.S >> i) & 1]
    m = len(survivors)
    y = np.arange(1 << m, dtype=np.int64)
    idx = np.full(1 << m, r.x, dtype=np.int64)
    for j, pos in enumerate(survivors):
        idx += ((y >> j) & 1) << pos
    return BiasedFunction(m, f.bias, f.values[idx])


def derivative(f: BiasedFunction, S: int) -> BiasedFunction:
    """Discrete derivative along every coordinate of S, lifted to the full cube.

    One pass per coordinate replaces the table by sigma * (f_{i->1} - f_{i->0});
    the result does not depend on the S coordinates. Its spectrum is
    coeffs[T \\ S] = fhat(T) for T containing S, zero elsewhere.
    """
    _check_mask(S, f.n)
    out = np.array(f.values)
    s = f.bias.sigma
    for i in bits(S):
        blk = out.reshape(-1, 2, 1 << i)
        d = s * (blk[:, 1, :] - blk[:, 0, :])
        blk[:, 0, :] = d
        blk[:, 1, :] = d
    return BiasedFunction(f.n, f.bias, out)


def laplacian(f: BiasedFunction, S: int) -> BiasedFunction:
    """Projection onto characters indexed by supersets of S."""
    _check_mask(S, f.n)
    spec = transform(f)
    masks = np.arange(1 << f.n, dtype=np.int64)
    keep = (masks & S) == S
    return from_spectrum(f.n, f.bias, np.where(keep, spec.coeffs, 0.0))


def truncate(f: BiasedFunction, r: int) -> BiasedFunction:
    """Low-degree part f^{<= r}: drop all characters of size above r."""
    if r < 0:
        raise ValueError("truncation degree must be >= 0")
    spec = transform(f)
    keep = popcounts(f.n) <= r
    return from_spectrum(f.n, f.bias, np.where(keep, spec.coeffs, 0.0))


# ---------------------------------------------------------------------------
# table utilities shared across modules
# ---------------------------------------------------------------------------

def superset_sums(table: np.ndarray, n: int) -> np.ndarray:
    """Zeta transform: out[S] = sum over T containing S of table[T], O(n 2^n)."""
    out = np.array(table, dtype=np.float64)
    if out.shape != (1 << n,):
        raise ValueError("table length must be 2^n")
    for i in range(n):
        blk = out.reshape(-1, 2, 1 << i)
        blk[:, 0, :] += blk[:, 1, :]
    return out


def character_table(n: int, bias: Bias) -> np.ndarray:
    """Matrix chi[S, x] = chi_S(x); O(4^n) memory, intended for small n only."""
    if n > 13:
        raise ValueError("character table is dense in 4^n; use the transform")
    x = np.arange(1 << n, dtype=np.int64)
    chi = np.ones((1 << n, 1 << n), dtype=np.float64)
    for i in range(n):
        col = (((x >> i) & 1) - bias.p) / bias.sigma
        has_i = ((x[:, None] >> i) & 1).astype(bool)  # rows S containing i
        chi = np.where(has_i, chi * col[None, :], chi)
    return chi
