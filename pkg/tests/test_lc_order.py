"""The relative log-concavity pre-order on known families and hand-built cases."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import lcorder as L
from lcorder import lc_order as O


@pytest.mark.parametrize("f, g", [
    (L.binomial(5, 0.4), L.poisson(2.0)),
    (L.binomial(4, 0.3), L.binomial(7, 0.3)),
    (L.poisson(3.0), L.negbinomial(4.0, 0.5)),
    (L.negbinomial(3.5, 0.4), L.negbinomial(1.5, 0.4)),
    (L.negbinomial(2.0, 0.3), L.geometric(0.3)),
    (L.bernoulli_sum([0.2, 0.5, 0.9]), L.binomial(3, 0.2)),
    (L.explicit([1.0]), L.poisson(1.0)),
])
def test_known_orderings(f, g):
    rep = L.lc_le(f, g)
    assert rep.verdict, rep
    assert rep.failure_kind == O.NONE


def test_reflexive_and_exact_for_finite():
    f = L.bernoulli_sum([0.1, 0.6])
    rep = L.lc_le(f, f)
    assert rep.verdict and rep.exact


def test_support_not_contained():
    rep = L.lc_le(L.poisson(2.0), L.binomial(4, 0.5))
    assert not rep.verdict
    assert rep.failure_kind == O.NOT_CONTAINED


def test_hole_in_support():
    f = L.explicit([0.4, 0.0, 0.6])
    rep = L.lc_le(f, L.binomial(2, 0.5))
    assert not rep.verdict
    assert rep.failure_kind == O.F_NOT_INTERVAL
    rep = L.lc_le(L.explicit([1.0]), f)
    assert rep.failure_kind == O.G_NOT_INTERVAL


def test_concavity_failure_has_witness():
    # geometric / poisson has a convex log ratio
    rep = L.lc_le(L.geometric(0.4), L.poisson(1.5))
    assert not rep.verdict
    assert rep.failure_kind == O.CONCAVITY
    assert rep.witness_index is not None
    assert rep.margin > 0


def test_ulc():
    assert L.is_ulc(L.poisson(4.0)).verdict
    assert L.is_ulc(L.bernoulli_sum([0.3, 0.7, 0.5])).verdict
    assert not L.is_ulc(L.geometric(0.5)).verdict
    assert L.is_ulc_order_k(L.binomial(6, 0.3), 6).verdict
    assert not L.is_ulc_order_k(L.binomial(6, 0.3), 5).verdict
    assert L.is_log_concave(L.geometric(0.5)).verdict
    assert not L.is_log_concave(L.explicit([0.45, 0.1, 0.45])).verdict


def test_sign_profile():
    prof = L.sign_profile([-0.1, -0.2, 0.0, 0.3, 0.1, -0.05])
    assert prof.signs == ("-", "+", "-")
    assert prof.change_count == 2
    assert L.sign_profile([0.0, 1e-16]).change_count == 0


def test_tilt_preserves_order():
    f = L.bernoulli_sum([0.2, 0.4, 0.7])
    g = L.poisson(1.3)
    ft, _ = L.tilt_to_mean(f, 1.0)
    gt, _ = L.tilt_to_mean(g, 1.0)
    assert L.lc_le(ft, gt).verdict


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=40, deadline=None)
def test_transitivity_on_random_chains(seed):
    h = L.binomial(10, 0.35)
    g = L.random_lc_minorant(h, seed)
    f = L.random_lc_minorant(g, seed + 1)
    assert L.lc_le(f, g).verdict and L.lc_le(g, h).verdict
    assert L.lc_le(f, h).verdict


@given(st.lists(st.floats(0.02, 0.98), min_size=1, max_size=10))
@settings(max_examples=50, deadline=None)
def test_bernoulli_sums_are_ulc_of_their_order(ps):
    f = L.bernoulli_sum(ps)
    assert L.is_ulc_order_k(f, len(ps)).verdict
    assert L.lc_le(f, L.poisson(sum(ps))).verdict
