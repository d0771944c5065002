"""Gamma densities, their weighted sums and the continuous checks."""

import math

import numpy as np
import pytest
from scipy import integrate, special, stats

import lcorder as L
from lcorder import continuous as C


def gamma_entropy(a, b):
    return a + math.log(b) + special.gammaln(a) + (1 - a) * special.digamma(a)


def gamma_kl(a1, b1, a2, b2):
    # scale parametrization
    return ((a1 - a2) * special.digamma(a1) - special.gammaln(a1) + special.gammaln(a2)
            + a2 * (math.log(b2) - math.log(b1)) + a1 * (b1 - b2) / b2)


def mixture_density(x, a1, a2, b1, b2):
    """Density of b1 X1 + b2 X2 as a Beta(a1, a2) mixture of gam(a1+a2, .)."""
    ap = a1 + a2

    def integrand(u):
        s = b2 + (b1 - b2) * u
        return stats.beta.pdf(u, a1, a2) * stats.gamma.pdf(x, ap, scale=s)

    return integrate.quad(integrand, 0, 1, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


@pytest.mark.parametrize("a, b", [(0.5, 1.0), (1.0, 2.0), (2.5, 0.7), (8.0, 3.0)])
def test_gamma_entropy_closed_form(a, b):
    h = L.differential_entropy(L.pdf_gamma(a, b))
    assert abs(h.value - gamma_entropy(a, b)) <= 1e-4
    assert abs(h.value - gamma_entropy(a, b)) <= h.error_bound + 1e-9


@pytest.mark.parametrize("p, q", [((2.0, 1.0), (2.0, 2.0)), ((3.0, 1.0), (2.0, 1.4)),
                                  ((1.5, 2.0), (4.0, 0.8))])
def test_gamma_kl_closed_form(p, q):
    d = L.kl_continuous(L.pdf_gamma(*p), L.pdf_gamma(*q))
    assert d.finite
    assert abs(d.value - gamma_kl(*p, *q)) <= 1e-4


def test_density_mass_and_mean():
    f = L.pdf_gamma(3.0, 2.0)
    assert f.mass() == pytest.approx(1.0, abs=1e-7)
    assert f.mean() == pytest.approx(6.0, rel=1e-6)


def test_uniform_entropy():
    h = L.differential_entropy(C.uniform_pdf(0.0, 3.0))
    assert h.value == pytest.approx(math.log(3.0), abs=1e-10)


def test_kl_infinite_off_support():
    assert not L.kl_continuous(L.pdf_gamma(2.0, 1.0), C.uniform_pdf(0.0, 1.0)).finite


def test_hypoexponential_density():
    # b1 E1 + b2 E2 has density (exp(-x/b1) - exp(-x/b2)) / (b1 - b2)
    f = L.weighted_gamma_sum([1.0, 1.0], [1.0, 2.0])
    x = f.nodes
    ref = (np.exp(-x / 1.0) - np.exp(-x / 2.0)) / (1.0 - 2.0)
    np.testing.assert_allclose(f.density, ref, atol=1e-7, rtol=0)


def test_equal_scales_give_gamma():
    f = L.weighted_gamma_sum([2.0, 3.0], [1.5, 1.5])
    ref = stats.gamma.pdf(f.nodes, 5.0, scale=1.5)
    np.testing.assert_allclose(f.density, ref, atol=1e-8, rtol=0)


def test_two_term_mixture_oracle():
    a1, a2, b1, b2 = 2.0, 3.0, 1.0, 2.0
    f = L.weighted_gamma_sum([a1, a2], [b1, b2])
    for x in (0.5, 2.0, 6.0, 12.0, 25.0):
        ref = mixture_density(x, a1, a2, b1, b2)
        got = math.exp(float(f.log_density_at(x)))
        assert got == pytest.approx(ref, rel=1e-5)


def test_scale_covariance():
    a, b = [2.0, 1.5], [1.0, 3.0]
    h1 = L.differential_entropy(L.weighted_gamma_sum(a, b)).value
    h2 = L.differential_entropy(L.weighted_gamma_sum(a, [2 * x for x in b])).value
    assert h2 - h1 == pytest.approx(math.log(2.0), abs=1e-6)


def test_grid_halving_within_error():
    a, b = [2.0, 3.0], [1.0, 2.0]
    fine = L.differential_entropy(L.weighted_gamma_sum(a, b))
    coarse = L.differential_entropy(L.weighted_gamma_sum(a, b, n_nodes=2049, inner_nodes=513))
    assert abs(fine.value - coarse.value) <= coarse.error_bound + fine.error_bound


def test_lc_order_between_gammas():
    # log(gam(a1)/gam(a2)) = (a1 - a2) log x + const, concave iff a1 >= a2
    big, small = L.pdf_gamma(3.0, 1.0), L.pdf_gamma(2.0, 1.0)
    assert L.lc_le_continuous(big, small).verdict
    assert not L.lc_le_continuous(small, big).verdict


def test_gamma_below_weighted_sum():
    a, b = [2.0, 3.0], [1.0, 2.0]
    fs = L.weighted_gamma_sum(a, b)
    g = L.pdf_gamma(5.0, 8.0 / 5.0)
    assert L.lc_le_continuous(g, fs).verdict
    chain = C.gamma_chain_report(a, b, 6.0, fs=fs)
    assert all(chain.values())


def test_minentropy_small():
    v = L.check_gamma_minentropy([2.0, 3.0], [1.0, 2.0], n_perturbations=4, rng_seed=1)
    assert v.status == L.HOLDS


def test_minentropy_needs_shape_at_least_one():
    v = L.check_gamma_minentropy([0.5, 2.0], [1.0, 2.0], n_perturbations=2)
    assert v.status == L.INCONCLUSIVE


def test_gamma_triangle_small():
    vs = L.check_gamma_triangle([2.0, 3.0], [1.0, 2.0], a_grid=[5.0, 6.0])
    assert vs and all(v.status == L.HOLDS for v in vs)


def test_gamma_triangle_rejects_small_shape():
    with pytest.raises(L.DomainError):
        L.check_gamma_triangle([2.0, 3.0], [1.0, 2.0], a_grid=[4.0])


def test_csv_header():
    text = L.pdf_gamma(2.0, 1.0, n_nodes=9).to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# {")
    assert lines[1] == "node,density"
    assert len(lines) == 2 + 9


@pytest.mark.parametrize("n", [0, 10])
def test_node_count_validation(n):
    with pytest.raises(L.DomainError):
        L.pdf_gamma(2.0, 1.0, n_nodes=n)


@pytest.mark.slow
def test_three_term_sum_is_above_gamma():
    a, b = [1.0, 2.0, 1.5], [1.0, 2.0, 0.5]
    fs = L.weighted_gamma_sum(a, b)
    assert fs.mass() == pytest.approx(1.0, abs=1e-6)
    assert all(C.gamma_chain_report(a, b, 9.0, fs=fs).values())


@pytest.mark.slow
def test_gamma_bound_survives_convolution():
    # gam(a1+a2) <=_lc f and gam(a3+a4) <=_lc g, so gam(a1+..+a4) <=_lc f*g
    rng = np.random.default_rng(2024)
    failures = 0
    for _ in range(100):
        shapes = rng.uniform(0.5, 3.0, 4)
        scales = rng.uniform(0.3, 3.0, 4)
        fg = L.weighted_gamma_sum(shapes, scales, n_nodes=1025, inner_nodes=257)
        g = L.pdf_gamma(float(shapes.sum()), 1.0, n_nodes=1025)
        failures += not L.lc_le_continuous(g, fg).verdict
    assert failures == 0
