"""Entropy, relative entropy and total variation against direct sums."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import lcorder as L


def direct_kl(p, q):
    return math.fsum(a * math.log(a / b) for a, b in zip(p, q) if a > 0)


def test_kl_binomial_poisson_direct():
    f, g = L.binomial(6, 0.25), L.poisson(1.5)
    ref = direct_kl(f.weights, [math.exp(-1.5) * 1.5 ** i / math.factorial(i) for i in range(7)])
    d = L.kl(f, g)
    assert d.finite
    assert abs(d.value - ref) <= max(d.error_bound, 1e-14)


def test_kl_geometric_closed_form():
    # D(Ge(a) | Ge(b)) = log(a/b) + (1-a)/a * log((1-a)/(1-b))
    a, b = 0.4, 0.25
    ref = math.log(a / b) + (1 - a) / a * math.log((1 - a) / (1 - b))
    d = L.kl(L.geometric(a), L.geometric(b))
    assert d.value == pytest.approx(ref, abs=1e-10)
    assert d.error_bound < 1e-9


def test_kl_infinite_off_support():
    assert not L.kl(L.poisson(1.0), L.binomial(3, 0.5)).finite
    assert not L.kl(L.explicit([0.5, 0.5]), L.explicit([1.0], offset=1)).finite
    assert L.kl(L.binomial(3, 0.5), L.poisson(1.0)).finite


def test_kl_of_self_is_zero():
    f = L.bernoulli_sum([0.3, 0.6, 0.2])
    assert L.kl(f, f).value == 0.0


def test_entropy_geometric_closed_form():
    r = 0.3
    ref = (-(1 - r) * math.log(1 - r) - r * math.log(r)) / r
    h = L.entropy(L.geometric(r))
    assert h.value == pytest.approx(ref, abs=1e-10)
    assert h.error_bound < 1e-9


def test_entropy_uniform():
    assert L.entropy(L.explicit([0.25] * 4)).value == pytest.approx(math.log(4), abs=1e-15)


def test_tv_by_enumeration():
    # bernoulli sum of (.1,.2,.3) against bi(3,.2), both by hand
    fs = [0.504, 0.398, 0.092, 0.006]
    bi = [0.512, 0.384, 0.096, 0.008]
    ref = 0.5 * sum(abs(a - b) for a, b in zip(fs, bi))
    tv = L.total_variation(L.bernoulli_sum([0.1, 0.2, 0.3]), L.binomial(3, 0.2))
    assert tv.value == pytest.approx(ref, abs=1e-15)
    assert ref == pytest.approx(0.014)


def test_ehm_bound_value():
    assert L.ehm_bound([0.1, 0.3]) == pytest.approx(0.02, abs=1e-15)
    assert L.ehm_bound([0.4, 0.4, 0.4]) == pytest.approx(0.0, abs=1e-30)
    with pytest.raises(ValueError):
        L.ehm_bound([0.0, 0.5])


def test_divergence_value_addition():
    a = L.DivergenceValue(1.0, 0.1)
    s = a + L.DivergenceValue(2.0, 0.2)
    assert (s.value, s.error_bound, s.finite) == (3.0, pytest.approx(0.3), True)
    assert not (a + L.kl(L.poisson(1.0), L.binomial(2, 0.5))).finite


pairs = st.tuples(st.lists(st.floats(0.02, 0.98), min_size=1, max_size=7), st.floats(0.3, 6.0))


@given(pairs)
@settings(max_examples=60, deadline=None)
def test_pinsker_and_nonnegativity(arg):
    ps, lam = arg
    f, g = L.bernoulli_sum(ps), L.poisson(lam)
    d, tv = L.kl(f, g), L.total_variation(f, g)
    assert d.value >= -d.error_bound
    assert 0.0 <= tv.value <= 1.0
    assert tv.value <= math.sqrt(d.value / 2) + tv.error_bound + d.error_bound


@given(st.lists(st.floats(0.02, 0.98), min_size=2, max_size=12))
@settings(max_examples=60, deadline=None)
def test_ehm_bound_dominates_tv(ps):
    n = len(ps)
    tv = L.total_variation(L.bernoulli_sum(ps), L.binomial(n, sum(ps) / n))
    assert tv.value <= L.ehm_bound(ps) + tv.error_bound
