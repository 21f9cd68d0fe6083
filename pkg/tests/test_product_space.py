import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biasedcube.cube_core import Bias, BiasedFunction, laplacian, transform
from biasedcube.product_space import (
    ESComponents,
    Factor,
    ProductSpace,
    efron_stein,
    es_apply,
    piece_product_checks,
    reduction_check,
    verify_es_hc,
)


def binary(p):
    return Factor(np.array([1.0 - p, p]))


def uniform_space(k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ProductSpace(tuple(binary(0.5) for _ in range(k)))


def random_space(rng, sizes):
    factors = []
    for m in sizes:
        raw = rng.uniform(0.05, 1.0, size=m)
        factors.append(Factor(raw / raw.sum()))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ProductSpace(tuple(factors))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def test_factor_validation():
    with pytest.raises(ValueError):
        Factor(np.array([1.0]))
    with pytest.raises(ValueError):
        Factor(np.array([0.5, 0.5, 0.1]))
    with pytest.raises(ValueError):
        Factor(np.array([1.0, 0.0]))
    f = Factor(np.array([0.2, 0.3, 0.5]))
    assert f.m == 3
    assert f.p == pytest.approx(0.2)
    assert f.sigma == pytest.approx(0.4)


def test_half_atom_warns_not_errors():
    with pytest.warns(UserWarning):
        ProductSpace((binary(0.5),))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ProductSpace((binary(0.2), Factor(np.array([0.3, 0.3, 0.4]))))


def test_space_layout():
    rng = np.random.default_rng(1)
    sp = random_space(rng, (2, 3, 2))
    assert sp.npoints == 12
    assert sp.stride(0) == 1 and sp.stride(1) == 2 and sp.stride(2) == 6
    w = sp.weights()
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    # index 0 + 2*2 + 6*1 holds atoms (0, 2, 1)
    want = sp.factors[0].probs[0] * sp.factors[1].probs[2] * sp.factors[2].probs[1]
    assert w[0 + 2 * 2 + 6 * 1] == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

def test_constant_decomposes_to_empty_piece():
    rng = np.random.default_rng(2)
    sp = random_space(rng, (3, 2))
    comp = efron_stein(np.full(6, 1.7), sp)
    assert np.allclose(comp.piece(0), 1.7)
    for S in range(1, 4):
        assert np.allclose(comp.piece(S), 0.0, atol=1e-12)


def test_binary_pieces_match_fourier():
    # indicator of (1,1) on two uniform bits: f^{=S} must equal fhat(S) chi_S
    sp = uniform_space(2)
    vals = np.array([0.0, 0.0, 0.0, 1.0])
    comp = efron_stein(vals, sp)
    f = BiasedFunction(2, Bias(0.5), vals)
    coeffs = transform(f).coeffs
    for S in range(4):
        chi = np.ones(4)
        for i in range(2):
            if (S >> i) & 1:
                chi *= np.array([(((x >> i) & 1) - 0.5) / 0.5 for x in range(4)])
        assert np.allclose(comp.piece(S), coeffs[S] * chi, atol=1e-12)


def test_random_mixed_space_invariants_hold():
    # efron_stein itself asserts reconstruction/orthogonality/Parseval
    rng = np.random.default_rng(3)
    sp = random_space(rng, (3, 2, 3))
    comp = efron_stein(rng.standard_normal(18), sp)
    assert comp.pieces.shape == (8, 18)
    assert not comp.pieces.flags.writeable


def test_pieces_of_junta_vanish_off_support():
    rng = np.random.default_rng(4)
    sp = random_space(rng, (2, 3, 2))
    # depends on factors {0, 2} only
    base = rng.standard_normal(4)
    vals = np.array([base[(i % 2) + 2 * ((i // 6) % 2)] for i in range(12)])
    comp = efron_stein(vals, sp)
    for S in range(8):
        if S & 0b010:
            assert np.allclose(comp.piece(S), 0.0, atol=1e-10)


def test_cap_enforced():
    sp = uniform_space(3)
    with pytest.raises(ValueError):
        efron_stein(np.zeros(9), sp)  # wrong length
    big = ProductSpace((Factor(np.full(128, 1.0 / 128)),) * 4)
    with pytest.raises(ValueError):
        efron_stein(np.zeros(128 ** 4), sp if False else big)


@given(seed=st.integers(0, 2 ** 31 - 1))
@settings(deadline=None, max_examples=25)
def test_decomposition_linear(seed):
    rng = np.random.default_rng(seed)
    sp = random_space(rng, (2, 3))
    a, b = rng.standard_normal(6), rng.standard_normal(6)
    ca, cb = efron_stein(a, sp), efron_stein(b, sp)
    cab = efron_stein(a + 2.0 * b, sp)
    assert np.allclose(cab.pieces, ca.pieces + 2.0 * cb.pieces, atol=1e-9)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def test_noise_endpoints():
    rng = np.random.default_rng(5)
    sp = random_space(rng, (3, 3))
    vals = rng.standard_normal(9)
    comp = efron_stein(vals, sp)
    assert np.allclose(es_apply(comp, "noise", rho=1.0), vals, atol=1e-10)
    mean = float(sp.weights() @ vals)
    assert np.allclose(es_apply(comp, "noise", rho=0.0), mean, atol=1e-10)


def test_noise_matches_resampling_matrix():
    rng = np.random.default_rng(6)
    sp = random_space(rng, (2, 3, 2))
    vals = rng.standard_normal(12)
    comp = efron_stein(vals, sp)
    # es_apply cross-checks internally on <= 4 factors; exercise several rho
    for rho in (0.1, 0.5, 0.9):
        out = es_apply(comp, "noise", rho=rho)
        assert out.shape == (12,)


def test_laplacian_specializes_to_cube():
    rng = np.random.default_rng(7)
    p = 0.2
    sp = ProductSpace((binary(p), binary(p), binary(p)))
    vals = rng.standard_normal(8)
    comp = efron_stein(vals, sp)
    f = BiasedFunction(3, Bias(p), vals)
    for S in range(8):
        want = laplacian(f, S).values
        got = es_apply(comp, "laplacian", S=S)
        assert np.allclose(got, want, atol=1e-10)


def test_es_apply_validation():
    rng = np.random.default_rng(8)
    sp = random_space(rng, (2, 2))
    comp = efron_stein(rng.standard_normal(4), sp)
    with pytest.raises(ValueError):
        es_apply(comp, "laplacian", S=4)
    with pytest.raises(ValueError):
        es_apply(comp, "noise", rho=1.5)
    with pytest.raises(ValueError):
        es_apply(comp, "melt")


# ---------------------------------------------------------------------------
# hypercontractivity
# ---------------------------------------------------------------------------

def test_es_hc_constant_equality():
    rng = np.random.default_rng(9)
    sp = random_space(rng, (2, 3))
    rep = verify_es_hc(np.full(6, 2.0), sp, 4, 1.0 / 64.0)
    assert rep["lhs"] == pytest.approx(16.0, rel=1e-12)
    assert rep["rhs"] == pytest.approx(16.0, rel=1e-12)
    assert rep["passed"]


def test_es_hc_three_binary_factors():
    rng = np.random.default_rng(10)
    sp = ProductSpace((binary(0.2),) * 3)
    for _ in range(20):
        rep = verify_es_hc(rng.standard_normal(8), sp, 4, 1.0 / 64.0)
        assert rep["passed"]


def test_es_hc_mixed_supports_sweep():
    rng = np.random.default_rng(11)
    for seed in range(100):
        srng = np.random.default_rng((11, seed))
        sp = random_space(srng, (2, 3, 3))
        rep = verify_es_hc(srng.standard_normal(18), sp, 4, 1.0 / 64.0)
        assert rep["passed"]


@pytest.mark.parametrize("q", [6, 8])
def test_es_hc_higher_even_q(q):
    rng = np.random.default_rng(12 + q)
    sp = random_space(rng, (2, 3))
    rho = 1.0 / (8.0 * q ** 1.5)
    for _ in range(10):
        assert verify_es_hc(rng.standard_normal(6), sp, q, rho)["passed"]


def test_es_hc_hypothesis_refusals():
    rng = np.random.default_rng(13)
    sp = random_space(rng, (2, 2))
    vals = rng.standard_normal(4)
    with pytest.raises(ValueError):
        verify_es_hc(vals, sp, 3, 0.01)  # odd q unsupported
    with pytest.raises(ValueError):
        verify_es_hc(vals, sp, 5, 0.01)
    with pytest.raises(ValueError):
        verify_es_hc(vals, sp, 4, 0.02)  # above 1/64


# ---------------------------------------------------------------------------
# term structure behind the reduction
# ---------------------------------------------------------------------------

def test_singly_covered_products_vanish():
    rng = np.random.default_rng(14)
    sp = random_space(rng, (2, 3, 2))
    counts = piece_product_checks(rng.standard_normal(12), sp, qs=(3, 4))
    assert counts[3]["checked"] > 0
    assert counts[3]["checked"] == counts[3]["zero"]
    assert counts[4]["checked"] == counts[4]["zero"]


def test_reduction_encodability():
    rng = np.random.default_rng(15)
    for seed in range(25):
        srng = np.random.default_rng((15, seed))
        sp = random_space(srng, (2, 3, 2))
        rep = reduction_check(srng.standard_normal(12), sp, q=4)
        assert rep["passed"], rep


def test_reduction_exhaustive_small_booleans():
    # every 0/1 table on a 2x2 space, q = 3 and 4
    sp = ProductSpace((binary(0.3), binary(0.4)))
    for bits in range(16):
        vals = np.array([float((bits >> i) & 1) for i in range(4)])
        for q in (3, 4):
            assert reduction_check(vals, sp, q=q)["passed"]
