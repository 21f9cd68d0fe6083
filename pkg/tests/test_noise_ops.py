import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasedcube.cube_core import Bias, BiasedFunction, Spectrum, biased_norm, transform
from biasedcube.noise_ops import (
    REPLACEMENT_RHO_MAX,
    DirectedParams,
    MixedFunction,
    NoiseParams,
    composition_gap,
    directed_inner,
    directed_noise_apply,
    hybrid_function,
    noise_apply,
    noise_stability,
    replacement_step_check,
)

import oracles


def make(n, p, values):
    return BiasedFunction(n, Bias(p), np.asarray(values, dtype=float))


def random_monotone(rng, n, p):
    w = rng.random(n)
    theta = rng.uniform(0.2, 0.8) * w.sum()
    vals = np.zeros(1 << n)
    for x in range(1 << n):
        s = sum(w[i] for i in range(n) if (x >> i) & 1)
        vals[x] = 1.0 if s >= theta else 0.0
    return make(n, p, vals)


# ---------------------------------------------------------------------------
# symmetric noise
# ---------------------------------------------------------------------------

def test_noise_identity_and_total_resample():
    rng = np.random.default_rng(0)
    f = make(4, 0.3, rng.standard_normal(16))
    assert np.allclose(noise_apply(f, 1.0).values, f.values, atol=1e-12)
    assert np.allclose(noise_apply(f, 0.0).values, f.expectation(), atol=1e-12)


def test_noise_dictator_closed_form():
    p, rho = 0.3, 0.6
    f = make(1, p, [0.0, 1.0])
    got = noise_apply(f, rho)
    assert got.values[0] == pytest.approx((1 - rho) * p, abs=1e-14)
    assert got.values[1] == pytest.approx(rho + (1 - rho) * p, abs=1e-14)


def test_noise_matches_transition_oracle():
    rng = np.random.default_rng(1)
    for n, p, rho in [(3, 0.1, 0.4), (4, 0.5, 0.25), (5, 0.8, 0.7)]:
        f = make(n, p, rng.standard_normal(1 << n))
        want = oracles.naive_noise(f.values, n, p, rho)
        assert np.allclose(noise_apply(f, rho).values, want, rtol=1e-9, atol=1e-11)


def test_stability_dictator_frozen_value():
    # f = x_1 at p = 1/4, rho = 1/2: p^2 + rho sigma^2 = 1/16 + 3/32 = 5/32
    f = make(1, 0.25, [0.0, 1.0])
    assert noise_stability(f, 0.5) == pytest.approx(5.0 / 32.0, abs=1e-15)


def test_stability_boolean_endpoints():
    rng = np.random.default_rng(2)
    f = make(4, 0.3, (rng.random(16) < 0.5).astype(float))
    mu = f.expectation()
    assert noise_stability(f, 0.0) == pytest.approx(mu * mu, rel=1e-12)
    assert noise_stability(f, 1.0) == pytest.approx(mu, rel=1e-12)


@given(seed=st.integers(0, 2 ** 31 - 1), p=st.floats(0.05, 0.95),
       r1=st.floats(0.0, 1.0), r2=st.floats(0.0, 1.0))
@settings(deadline=None, max_examples=40)
def test_semigroup_property(seed, p, r1, r2):
    rng = np.random.default_rng(seed)
    f = make(4, p, rng.standard_normal(16))
    lhs = noise_apply(noise_apply(f, r1), r2)
    rhs = noise_apply(f, r1 * r2)
    assert np.allclose(lhs.values, rhs.values, rtol=1e-9, atol=1e-11)


def test_stability_monotone_in_rho_and_contraction():
    rng = np.random.default_rng(3)
    f = make(5, 0.2, rng.standard_normal(32))
    rhos = np.linspace(0.0, 1.0, 11)
    stabs = [noise_stability(f, r) for r in rhos]
    assert all(a <= b + 1e-12 for a, b in zip(stabs, stabs[1:]))
    for r in [1.0, 2.0, 3.0, 4.0]:
        for rho in [0.2, 0.7]:
            assert biased_norm(noise_apply(f, rho), r) <= biased_norm(f, r) + 1e-11


def test_noise_params_validation():
    with pytest.raises(ValueError):
        NoiseParams(rho=1.5)
    with pytest.raises(ValueError):
        NoiseParams(rho=0.5, rho_prime=-0.1)
    with pytest.raises(ValueError):
        noise_apply(make(1, 0.5, [0, 1]), 1.2)


# ---------------------------------------------------------------------------
# directed operators
# ---------------------------------------------------------------------------

def test_directed_dictator_up():
    dp = DirectedParams(0.2, 0.5)
    f = make(1, 0.2, [0.0, 1.0])
    up = directed_noise_apply(f, dp, "up")
    assert up.bias.p == pytest.approx(0.5)
    assert up.values[0] == pytest.approx(0.0, abs=1e-14)
    assert up.values[1] == pytest.approx(0.2 / 0.5, abs=1e-14)


def test_directed_constant_fixed():
    dp = DirectedParams(0.1, 0.4)
    c = make(3, 0.1, np.full(8, 2.5))
    assert np.allclose(directed_noise_apply(c, dp, "up").values, 2.5, atol=1e-14)
    c2 = make(3, 0.4, np.full(8, -1.0))
    assert np.allclose(directed_noise_apply(c2, dp, "down").values, -1.0, atol=1e-14)


def test_directed_bias_mismatch_rejected():
    dp = DirectedParams(0.2, 0.5)
    with pytest.raises(ValueError):
        directed_noise_apply(make(1, 0.5, [0, 1]), dp, "up")
    with pytest.raises(ValueError):
        directed_noise_apply(make(1, 0.2, [0, 1]), dp, "down")
    with pytest.raises(ValueError):
        DirectedParams(0.5, 0.2)


def test_composition_identity_small_matrices():
    for (p, q) in [(0.1, 0.3), (0.2, 0.5), (0.05, 0.9), (0.45, 0.55)]:
        dp = DirectedParams(p, q)
        for n in [1, 2, 4]:
            assert composition_gap(dp, n) < 1e-10


def test_directed_adjointness():
    rng = np.random.default_rng(4)
    dp = DirectedParams(0.15, 0.6)
    n = 4
    f = make(n, dp.p, rng.standard_normal(1 << n))
    g = make(n, dp.q, rng.standard_normal(1 << n))
    up = directed_noise_apply(f, dp, "up")
    down = directed_noise_apply(g, dp, "down")
    lhs = float(up.weights() @ (up.values * g.values))
    rhs = float(f.weights() @ (f.values * down.values))
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_monotone_coupling_inner_product():
    rng = np.random.default_rng(5)
    dp = DirectedParams(0.25, 0.5)
    for seed in range(5):
        f = random_monotone(np.random.default_rng(seed), 5, dp.p)
        assert directed_inner(f, dp) == pytest.approx(f.expectation(), rel=1e-10)
    # Boolean but not monotone: inner product may only drop
    g = make(2, dp.p, [1.0, 0.0, 0.0, 1.0])
    assert directed_inner(g, dp) <= g.expectation() + 1e-12


# ---------------------------------------------------------------------------
# replacement hybrids
# ---------------------------------------------------------------------------

def test_hybrid_endpoints_match_pure_cubes():
    rng = np.random.default_rng(6)
    n, p = 4, 0.2
    f = make(n, p, rng.standard_normal(16))
    coeffs = transform(f).coeffs
    h0 = hybrid_function(coeffs, n, p, 0)
    assert np.allclose(h0.values, f.values, atol=1e-12)
    hn = hybrid_function(coeffs, n, p, n)
    g = transform(Spectrum(n, Bias(0.5), coeffs), "inverse")
    assert np.allclose(hn.values, g.values, atol=1e-12)


def test_replacement_step_constant_function():
    f = make(3, 0.3, np.full(8, 1.7))
    rep = replacement_step_check(f, 0.25, 2)
    assert rep["passed"]
    assert rep["step"]["derivative_term"] == pytest.approx(0.0, abs=1e-14)
    assert rep["step"]["lhs"] == pytest.approx(rep["step"]["rhs_main"], rel=1e-12)


def test_replacement_step_dictator_frozen():
    # n=1, p=0.1, rho=0.25, t=1, f = x_1: all three pieces by direct enumeration.
    p, rho = 0.1, 0.25
    f = make(1, p, [0.0, 1.0])
    rep = replacement_step_check(f, rho, 1)
    sigma = math.sqrt(p * (1 - p))
    lam = ((1 - p) ** 3 + p ** 3) / (p * (1 - p))
    # biased side: T_rho f = p + rho sigma chi
    v0 = p + rho * sigma * ((0 - p) / sigma)
    v1 = p + rho * sigma * ((1 - p) / sigma)
    lhs = (1 - p) * v0 ** 4 + p * v1 ** 4
    # uniform side: f_1 = p + sigma chi^{1/2}, T^1 multiplies by 2 rho
    u0 = p - 2 * rho * sigma
    u1 = p + 2 * rho * sigma
    rhs_main = 0.5 * (u0 ** 4 + u1 ** 4)
    dterm = sigma ** 4  # (D_1 f)_1 is the constant sigma
    assert rep["step"]["lhs"] == pytest.approx(lhs, rel=1e-12)
    assert rep["step"]["rhs_main"] == pytest.approx(rhs_main, rel=1e-12)
    assert rep["step"]["derivative_term"] == pytest.approx(dterm, rel=1e-12)
    assert rep["step"]["rhs"] == pytest.approx(rhs_main + 3 * lam * rho ** 4 * dterm, rel=1e-12)
    assert rep["passed"]
    assert rep["step"]["slack"] > 1e-6


@pytest.mark.parametrize("p", [0.05, 0.2, 0.5])
def test_replacement_all_steps_random(p):
    rng = np.random.default_rng(int(p * 1000))
    n = 5
    for _ in range(4):
        f = make(n, p, rng.standard_normal(1 << n))
        for t in range(1, n + 1):
            rep = replacement_step_check(f, 0.25, t)
            assert rep["passed"], (p, t, rep)


def test_replacement_validation():
    f = make(2, 0.3, [0, 1, 1, 0])
    with pytest.raises(ValueError):
        replacement_step_check(f, 0.25, 0)
    with pytest.raises(ValueError):
        replacement_step_check(f, 0.25, 3)
    with pytest.raises(ValueError):
        replacement_step_check(f, REPLACEMENT_RHO_MAX + 0.01, 1)


def test_mixed_function_weights_product():
    mf = MixedFunction(2, [0.25, 0.5], [1.0, 1.0, 1.0, 1.0])
    w = mf.weights()
    assert w[0] == pytest.approx(0.75 * 0.5)
    assert w[1] == pytest.approx(0.25 * 0.5)
    assert w.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        MixedFunction(2, [0.0, 0.5], [0, 0, 0, 0])
