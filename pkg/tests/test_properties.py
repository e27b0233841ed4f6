"""Randomized invariants over the scalar functions and the constructors."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from corrspec.bounds import (
    fueredi_komlos_reference,
    lambda1_bound,
    theta_min_bound,
    theta_min_relaxed,
    w1_bound,
    wmax_bound,
)
from corrspec.constructors import (
    block_counterexample,
    convex_with_identity,
    embed,
    random_correlation,
    rank_one_k,
    tensor_product,
)
from corrspec.core import characteristic, g_n, legal_domain, s, s_n
from corrspec.spectral import characteristic_identity_residuals, eigendecompose

unit = st.floats(0.0, 1.0, allow_nan=False)
dims = st.integers(2, 40)


@st.composite
def legal_points(draw, positive=False):
    n = draw(dims)
    r = draw(st.floats(0.01, 1.0))
    phi = draw(st.floats(0.0, math.pi / 2 if positive else math.pi))
    c, sig = r * math.cos(phi), r * math.sin(phi)
    assume(legal_domain(n, c, sig))
    if positive:
        assume(c > 1e-6)
    return n, c, sig


@given(unit, unit)
def test_s_monotone_and_bounded(x, y):
    lo, hi = sorted((x, y))
    assert s(lo) <= s(hi)
    assert lo <= s(lo) <= 1.0


@given(dims, unit)
def test_g_n_is_affine_and_bounded(n, x):
    assert 1 / n <= g_n(n, x) <= 1.0 + 1e-15
    assert g_n(n, x) == pytest.approx(x + (1 - x) / n)


@given(legal_points())
def test_bounds_in_unit_range(p):
    n, c, sig = p
    assert 0 < lambda1_bound(n, c, sig) / n <= 1 + 1e-12
    assert 0 < wmax_bound(n, c, sig) <= 1 + 1e-12
    assert theta_min_bound(n, c, sig) <= theta_min_relaxed(c, sig) + 1e-12


@given(legal_points(positive=True))
def test_w1_bound_dominates_comparator(p):
    n, c, sig = p
    assert w1_bound(n, c, sig) >= fueredi_komlos_reference(c, sig) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(0, 2**32 - 1))
def test_identities_and_soundness_on_random_gram(n, seed):
    C = random_correlation(n, seed=seed)
    r = characteristic_identity_residuals(C)
    assert r.r1 < 1e-10 and r.r2 < 1e-10
    ch = characteristic(C)
    S = eigendecompose(C)
    assert S.eigenvalues[0] >= lambda1_bound(n, ch.c, ch.sigma) - 1e-9 * n


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10**6))
def test_tensor_g_products(m1, m2, seed):
    A = random_correlation(m1, seed=seed)
    B = random_correlation(m2, seed=seed + 1)
    a, b, t = characteristic(A), characteristic(B), characteristic(tensor_product(A, B))
    assert abs(g_n(m1 * m2, t.c) - g_n(m1, a.c) * g_n(m2, b.c)) < 1e-12
    assert abs(g_n(m1 * m2, t.radius_sq) - g_n(m1, a.radius_sq) * g_n(m2, b.radius_sq)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10**6))
def test_embed_transfer(n, seed):
    C = random_correlation(n, seed=seed)
    a, e = characteristic(C), characteristic(embed(C))
    assert abs(e.c - (n - 1) / (n + 1) * a.c) < 1e-12
    assert abs(e.radius_sq - (n - 1) / (n + 1) * a.radius_sq) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.floats(0.0, 1.0), st.integers(0, 10**6))
def test_convex_with_identity_spectrum_map(n, mu, seed):
    C = random_correlation(n, seed=seed)
    S0, S1 = eigendecompose(C), eigendecompose(convex_with_identity(C, mu))
    np.testing.assert_allclose(S1.eigenvalues, (1 - mu) * S0.eigenvalues + mu, atol=1e-10)
    if mu < 0.99 and np.min(np.abs(np.diff(S0.eigenvalues))) > 1e-6:
        np.testing.assert_allclose(S1.weights, S0.weights, atol=1e-8)


@given(st.integers(2, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
def test_rank_one_quantised_mean(nk):
    n, k = nk
    C = rank_one_k(n, k)
    assert abs(g_n(n, characteristic(C).c) - (1 - 2 * k / n) ** 2) < 1e-12


@given(st.sampled_from(range(4, 21, 2)), st.floats(0.01, 0.99))
def test_block_counterexample_sigma_on_edge(n, eps):
    ch = characteristic(block_counterexample(n, eps))
    assert abs(ch.sigma - math.sqrt((n - 2) / n) * (1 - ch.c)) < 1e-10
