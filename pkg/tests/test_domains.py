import math

import numpy as np
import pytest

from corrspec.domains import (
    Condition,
    Status,
    classify,
    conditions_bitmask,
    counterexample_triangle,
    embedded_triangle_feasible,
    inverse_embedding_characteristic,
    perturbation_mu_max,
    perturbation_route,
    rank_one_feasible_k,
    rank_one_mean,
    region_membership,
    simple_conditions,
    simple_guarantee,
    refined_conditions,
    refined_guarantee,
    triangle_edge_sigma,
)
from corrspec.exceptions import DomainError, ExcludedInputError, PreconditionError, UnsupportedInputError

from oracles import g, s_ref


def test_simple_guarantee_examples():
    assert simple_guarantee(12, 0.6, 0.3) is Condition.I
    assert simple_guarantee(406, 0.14, 0.017) is Condition.II
    assert simple_guarantee(4, 0.3, 0.2) is Condition.III
    assert simple_guarantee(10, 0.1, 0.5) is None
    # non-strict boundaries
    assert simple_conditions(12, 0.5, 0.8)[0]
    assert simple_conditions(4, 0.6, 0.1)[1]


def test_refined_guarantee_example():
    n, c, sig = 12, 0.2, 0.1
    assert simple_guarantee(n, c, sig) is Condition.III
    val = g(n, c) ** 2 / g(n, c * c + sig * sig)
    assert val == pytest.approx(0.5505376344086022, abs=1e-14)
    flags = refined_conditions(n, c, sig)
    assert flags == (False, True, True)
    assert refined_guarantee(n, c, sig) is Condition.II
    third = s_ref(g(n, c * c / (c * c + sig * sig)))
    assert third == pytest.approx(0.8979112128771107, abs=1e-14)


def test_refined_guarantee_strict():
    # g_n(c) = 1/2 exactly at c = (n/2 - 1)/(n - 1)
    n = 5
    c = (n / 2 - 1) / (n - 1)
    assert not refined_conditions(n, c, 0.0 + 1e-3)[0]


def test_guarantee_errors():
    with pytest.raises(UnsupportedInputError):
        simple_guarantee(10, 0.0, 0.3)
    with pytest.raises(DomainError):
        refined_guarantee(10, 0.9, 0.9)


def test_bitmask():
    assert conditions_bitmask((True, False, True)) == 5
    assert conditions_bitmask((False, False, False)) == 0


def test_regions():
    r = region_membership(None, 0.2, 0.3)
    assert r.A and r.A2 and r.B1 and not r.A1 and not r.B2
    r = region_membership(None, 0.05, 0.5)
    assert r.B2 and r.B1
    r = region_membership(None, 0.45, 0.6)
    assert r.unknown
    r = region_membership(None, -0.1, 0.5)
    assert not (r.A or r.B1 or r.B2)


def test_triangle():
    assert counterexample_triangle(4, 0.1, 0.3)
    assert counterexample_triangle(4, 0.0, math.sqrt(0.5))  # edge included
    assert not counterexample_triangle(4, 0.1, 0.1)
    assert triangle_edge_sigma(4, 0.0) == pytest.approx(math.sqrt(0.5))
    with pytest.raises(PreconditionError):
        counterexample_triangle(5, 0.1, 0.3)


def test_inverse_embedding():
    src = inverse_embedding_characteristic(4, 0.0, 0.5)
    assert src.c_prime == 0.0
    assert src.sigma_prime == pytest.approx(0.5 * math.sqrt(5 / 3))
    assert inverse_embedding_characteristic(4, 0.5, 0.1) is None
    with pytest.raises(PreconditionError):
        inverse_embedding_characteristic(4, 0.1, 0.0)


def test_embedded_triangle_odd_only():
    assert embedded_triangle_feasible(7, 0.05, 0.4)
    assert not embedded_triangle_feasible(6, 0.05, 0.4)
    assert not embedded_triangle_feasible(7, -0.05, 0.4)


def test_mu_max():
    assert perturbation_mu_max(8, 1 / 7) == pytest.approx(0.03451779686442458, abs=1e-15)
    assert perturbation_mu_max(8, 0.9) is None


def test_rank_one_mean_and_k():
    assert rank_one_mean(8, 6) == pytest.approx(1 / 7)
    assert rank_one_mean(4, 2) == pytest.approx(-1 / 3)
    assert rank_one_mean(5, 0) == 1.0
    assert rank_one_feasible_k(8, 0.1, 0.2) == [2, 6]


def test_perturbation_route():
    r = perturbation_route(8, 0.1, 0.68)
    assert r is not None and r.k == 6
    assert 0 < r.mu < perturbation_mu_max(8, 1 / 7)
    assert r.nu == pytest.approx(0.3)
    assert perturbation_route(8, 0.1, 0.8) is None


def test_classify():
    rep = classify(406, 0.14, 0.017)
    assert rep.status is Status.GUARANTEED and rep.refined is Condition.II
    rep = classify(4, 0.1, 0.3)
    assert rep.status is Status.COUNTEREXAMPLE and rep.triangle_feasible
    rep = classify(8, 0.1, 0.68)
    assert rep.perturbation_feasible
    assert classify(50, -0.01, 0.3).simple is None
    with pytest.raises(ExcludedInputError):
        classify(5, 0.0, 0.0)
    d = classify(12, 0.6, 0.3).to_dict()
    assert d["simple"] == "I" and d["status"] == "GUARANTEED"


def test_interface_aliases():
    from corrspec import domains

    assert domains.theorem3_guarantee is simple_guarantee
    assert domains.theorem5_guarantee is refined_guarantee
