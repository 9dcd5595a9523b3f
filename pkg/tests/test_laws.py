import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from poissoncomp import laws
from poissoncomp.errors import DegenerateRates
from poissoncomp.laws import BirthRates, CompositionParams, RateFunction
from poissoncomp.specfun import mittag_leffler

rates = st.sampled_from([0.5, 1.0, 2.0])
orders = st.sampled_from([0.5, 0.8, 1.0])
times = st.sampled_from([0.5, 1.0, 2.0])
light = settings(max_examples=25, deadline=None)


# frozen values from independent oracles (double sums, closed forms)
def test_iterated_pmf_values():
    assert laws.iterated_poisson_pmf(0, CompositionParams()) == pytest.approx(math.exp(-(1 - math.exp(-1))), rel=1e-12)
    assert laws.iterated_poisson_pmf(0, CompositionParams()) == pytest.approx(0.531464, abs=5e-7)
    assert laws.iterated_poisson_pmf(1, CompositionParams()) == pytest.approx(0.531464 * math.exp(-1), abs=5e-7)
    assert laws.iterated_poisson_pmf(0, CompositionParams(2.0, 1.0, 1.0, 0.0)) == 1.0


@light
@given(rates, rates, times, st.integers(0, 12))
def test_iterated_pmf_against_double_sum(la, lb, t, k):
    p = CompositionParams(la, lb, 1.0, t)
    n = np.arange(200)
    oracle = float(np.sum(stats.poisson.pmf(n, lb * t) * stats.poisson.pmf(k, la * n)))
    assert laws.iterated_poisson_pmf(k, p) == pytest.approx(oracle, rel=1e-9, abs=1e-300)


@light
@given(rates, rates, times)
def test_iterated_normalization_and_moments(la, lb, t):
    p = CompositionParams(la, lb, 1.0, t)
    table = laws.iterated_poisson_table(p, tail_tol=1e-12)
    direct = math.fsum(laws.iterated_poisson_pmf(k, p) for k in range(len(table) + 40))
    assert direct == pytest.approx(1.0, abs=1e-8)
    mean, var = laws.iterated_poisson_moments(p)
    assert mean == pytest.approx(la * lb * t) and var == pytest.approx(la * (1 + la) * lb * t)
    # Wald
    assert mean == pytest.approx(lb * t * la) and var == pytest.approx(lb * t * la + la * la * lb * t)
    assert table.mean() == pytest.approx(mean, rel=1e-7)
    h = 1e-5
    slope = (laws.iterated_poisson_pgf(1.0, p) - laws.iterated_poisson_pgf(1.0 - h, p)) / h
    assert slope == pytest.approx(mean, rel=1e-4, abs=1e-6)


def test_iterated_pgf_examples():
    assert laws.iterated_poisson_pgf(1.0, CompositionParams(1.7, 0.3, 1.0, 2.0)) == 1.0
    assert laws.iterated_poisson_pgf(0.0, CompositionParams()) == pytest.approx(0.531464, abs=5e-7)
    assert laws.iterated_poisson_pgf(0.5, CompositionParams(1, 1, 1, 2)) == pytest.approx(math.exp(-0.786939),
                                                                                         rel=1e-6)
    assert laws.iterated_poisson_moments(CompositionParams(2, 3, 1, 1)) == pytest.approx((6, 18))
    assert laws.iterated_poisson_moments(CompositionParams(2, 3, 1, 0)) == pytest.approx((0, 0))


def test_composition_does_not_commute():
    p = CompositionParams(1.0, 2.0, 1.0, 1.0)
    assert abs(laws.iterated_poisson_pgf(0.0, p) - laws.iterated_poisson_pgf(0.0, p.swapped())) > 1e-3


@pytest.mark.parametrize("k,la,lb,t", [(0, 1, 1, 1), (3, 0.5, 2, 1), (5, 2, 0.5, 1.5)])
def test_dde_residual(k, la, lb, t):
    assert abs(laws.iterated_pmf_dde_residual(k, CompositionParams(la, lb, 1.0, t), 1e-4)) < 1e-6


def test_nonhom_composition():
    const = RateFunction.constant(1.5)
    p = CompositionParams(0.8, 1.5, 1.0, 1.2)
    for u in (0.0, 0.4, 1.0):
        assert laws.nonhom_composition_pgf(u, const, 0.8, 1.2) == pytest.approx(laws.iterated_poisson_pgf(u, p))
    assert laws.nonhom_composition_pgf(0.0, RateFunction.linear(2.0, 10.0), 1.0, 1.0) == pytest.approx(0.531464,
                                                                                                      abs=5e-7)
    rf = RateFunction.linear(2.0, 10.0)
    pmf = [laws.nonhom_composition_pmf(k, rf, 1.0, 1.0) for k in range(60)]
    assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-10)
    assert math.fsum(0.3 ** k * q for k, q in enumerate(pmf)) == pytest.approx(
        laws.nonhom_composition_pgf(0.3, rf, 1.0, 1.0), abs=1e-12)


def test_reversed_composition_mean():
    assert laws.reversed_composition_mean(RateFunction.constant(2.0), 1.0, 1.5) == pytest.approx(3.0)
    assert laws.reversed_composition_mean(RateFunction.constant(2.0), 1.0, 0.0) == 0.0
    oracle = sum((j - 0.5) * stats.poisson.sf(j - 1, 1.0) for j in range(1, 51))
    assert laws.reversed_composition_mean(RateFunction.linear(1.0, 10.0), 1.0, 1.0) == pytest.approx(oracle, rel=1e-9)


def test_hitting_times():
    p = CompositionParams(1.0, 1.0)
    m1 = math.exp(-1) / (1 - math.exp(-1))
    assert laws.hitting_time_total_mass(1, 1.0) == pytest.approx(0.581977, abs=5e-7)
    assert laws.hitting_time_total_mass(1, 1.0) == pytest.approx(m1, rel=1e-10)
    assert laws.hitting_time_total_mass(2, 1.0) == pytest.approx(m1 ** 2 + 0.5 * m1, rel=1e-10)
    quad = integrate.quad(lambda s: laws.hitting_time_density(1, s, p), 0, math.inf, epsrel=1e-12)[0]
    assert quad == pytest.approx(m1, rel=1e-8)
    for k in range(1, 11):
        for la in (0.5, 1.0, 2.0):
            assert 0.0 < laws.hitting_time_total_mass(k, la) < 1.0


def test_frac_poisson():
    assert laws.frac_poisson_pmf(0, 0.0, 0.6, 1.0) == 1.0
    assert laws.frac_poisson_pmf(0, 1.3, 0.6, 2.0) == pytest.approx(mittag_leffler(0.6, 1.0, -2.0 * 1.3 ** 0.6),
                                                                    rel=1e-12)
    for m in range(20):
        assert laws.frac_poisson_pmf(m, 1.5, 1.0, 2.0) == pytest.approx(stats.poisson.pmf(m, 3.0), rel=1e-8)


@light
@given(orders, rates, times)
def test_frac_poisson_normalization_and_mean(nu, lb, t):
    pmf = [laws.frac_poisson_pmf(m, t, nu, lb) for m in range(80)]
    assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-8)
    mean = lb * t ** nu / math.gamma(1 + nu)
    assert math.fsum(m * q for m, q in enumerate(pmf)) == pytest.approx(mean, rel=1e-7)


def test_tau_examples():
    assert laws.tau_density(2, 1.0, 1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-12)
    assert laws.tau_laplace(1, 1.0, 1.0, 1.0) == 0.5
    assert laws.tau_laplace(3, 1e-12, 0.6, 1.0) == pytest.approx(1.0, abs=1e-6)
    s, nu, lb = 0.7, 0.6, 1.5
    assert laws.tau_density(1, s, nu, lb) == pytest.approx(lb * s ** (nu - 1) * mittag_leffler(nu, nu, -lb * s ** nu),
                                                           rel=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 4), st.sampled_from([0.5, 0.7, 0.9]), rates)
def test_tau_density_integrates_to_one(k, nu, lb):
    f = lambda s: laws.tau_density(k, s, nu, lb)  # noqa: E731
    total = integrate.quad(f, 0, 1, limit=200)[0] + integrate.quad(f, 1, math.inf, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-6)
    x = 2.0
    assert integrate.quad(f, 0, x, limit=200)[0] == pytest.approx(laws.tau_cdf(k, x, nu, lb), abs=1e-8)


def test_composed_tau_examples():
    p = CompositionParams(1.0, 1.0, 1.0)
    assert laws.composed_tau_pmf(0, 1, p) == pytest.approx(0.5, rel=1e-12)
    assert laws.composed_tau_pgf(0.0, 1, p) == pytest.approx(0.5)
    assert laws.composed_tau_pgf(1.0, 3, CompositionParams(1.0, 2.0, 0.6)) == 1.0
    q = CompositionParams(1.5, 2.0, 1.0)
    for u in (0.0, 0.3, 0.7):
        assert laws.composed_tau_pgf(u, 3, q) == pytest.approx((1 + (1 - u) * 1.5 / 2.0) ** -3, rel=1e-14)


@settings(max_examples=8, deadline=None)
@given(rates, rates, st.sampled_from([0.5, 0.8]), st.integers(1, 3))
def test_composed_tau_duality(la, lb, nu, k):
    # u = 0.7 also bounds the normalization of these heavy-tailed laws through Abel summation
    p = CompositionParams(la, lb, nu)
    pmf = [laws.composed_tau_pmf(r, k, p) for r in range(50)]
    assert min(pmf) >= 0.0
    for u in (0.0, 0.3, 0.7):
        series = math.fsum(u ** r * v for r, v in enumerate(pmf))
        assert series == pytest.approx(laws.composed_tau_pgf(u, k, p), abs=1e-6)


def test_dml():
    assert laws.dml_pmf(0, 1.0, 1.0) == pytest.approx(0.5, rel=1e-12)
    assert laws.dml_pmf(1, 1.0, 1.0) == pytest.approx(0.25, rel=1e-12)
    assert laws.dml_pmf(0, 0.5, 1.0) == pytest.approx(laws.composed_tau_pmf(0, 1, CompositionParams(1, 1, 0.5)),
                                                      rel=1e-12)
    for r in range(8):
        assert laws.dml_pmf(r, 0.7, 2.0) == pytest.approx(
            laws.composed_tau_pmf(r, 1, CompositionParams(1.0, 2.0, 0.7)), rel=1e-9)


def test_rescaled_tau_laplace():
    assert abs(laws.rescaled_tau_laplace(10 ** 6, 1.0, 1.0, 0.5, 1.0) - math.exp(-1)) < 1e-5
    assert laws.rescaled_tau_laplace(5, 1.0, 0.0, 0.5, 1.0) == 1.0
    assert laws.rescaled_tau_laplace(1, 2.0, 0.5, 1.0, 1.5) == pytest.approx(1 / (1 + 1.5 * 2 * 0.5))


def test_yule_tau():
    p = CompositionParams(1.0, 1.0, 1.0)
    assert laws.yule_tau_pmf(1, 1, p) == pytest.approx(0.5)
    assert laws.yule_tau_pmf(2, 1, p) == pytest.approx(1 / 6)
    assert laws.yule_tau_pgf(1e-9, 1, p) == pytest.approx(0.0, abs=1e-8)
    # closed form 1 - (1-u) ln(1/(1-u)) / u of the 1/(r(r+1)) law, at u = 0.5
    assert laws.yule_tau_pgf(0.5, 1, p) == pytest.approx(1 - math.log(2), rel=1e-9)
    assert laws.yule_tau_pgf(0.4, 1, p) == pytest.approx(
        math.fsum(0.4 ** r * laws.yule_tau_pmf(r, 1, p) for r in range(1, 80)), abs=1e-6)
    q = CompositionParams(1.0, 6.0, 1.0)
    pmf = [laws.yule_tau_pmf(r, 2, q) for r in range(1, 150)]
    assert math.fsum(pmf) == pytest.approx(1.0, abs=1e-6)
    mean, _ = laws.yule_tau_moments(2, q)
    assert mean == pytest.approx((6.0 / 5.0) ** 2)
    assert math.fsum(r * v for r, v in enumerate(pmf, 1)) == pytest.approx(mean, rel=1e-4)


def test_yule_tau_far_tail():
    # binomial terms overflow floats here; the sum must still resolve
    assert laws.yule_tau_pmf(1200, 1, CompositionParams(1.0, 1.0, 1.0)) == pytest.approx(1 / (1200 * 1201),
                                                                                         rel=1e-9)


def test_negbin_decomposition():
    mu, q = laws.negbin_decomposition_params(1, 1.0, 1.0)
    assert (mu, q) == pytest.approx((math.log(2), 0.5))
    mu, q = laws.negbin_decomposition_params(3, 1.0, 2.0)
    # Wald: mean of the random sum is the negative binomial mean k la / lb
    assert mu * laws.logarithmic_mean(q) == pytest.approx(3 * 1.0 / 2.0)
    assert sum(laws.logarithmic_pmf(r, q) for r in range(1, 200)) == pytest.approx(1.0)


def test_frac_birth():
    r = BirthRates((1.0, 2.0, 3.0, 4.0))
    assert laws.frac_birth_pmf(1, 1.0, 0.7, r) == pytest.approx(mittag_leffler(0.7, 1.0, -1.0), rel=1e-12)
    lin = BirthRates.linear(1.5, 12)
    q = math.exp(-1.5)
    for k in range(1, 12):
        assert laws.frac_birth_pmf(k, 1.0, 1.0, lin) == pytest.approx(q * (1 - q) ** (k - 1), rel=1e-9)
    with pytest.raises(DegenerateRates):
        BirthRates((1.0, 1.0))


@pytest.mark.parametrize("nu", [0.6, 1.0])
def test_composed_birth_pgf(nu):
    r = BirthRates((1.0, 2.0, 3.0, 4.0))
    pmf = [laws.composed_birth_pmf(m, 1.0, nu, r, 1.0) for m in range(80)]
    for u in (0.0, 0.5, 0.9):
        assert math.fsum(u ** m * q for m, q in enumerate(pmf)) == pytest.approx(
            laws.composed_birth_pgf(u, 1.0, nu, r, 1.0), abs=1e-8)


def test_phi_laws():
    assert laws.phi_density(2, 1.0, 1.0, 1.0) == pytest.approx(2 * math.exp(-1) * (1 - math.exp(-1)), rel=1e-10)
    t, nu, lb = 0.8, 0.7, 1.3
    assert laws.phi_density(1, t, nu, lb) == pytest.approx(lb * t ** (nu - 1) * mittag_leffler(nu, nu, -lb * t ** nu),
                                                           rel=1e-10)
    p = CompositionParams(1.0, 1.0, 0.5)
    assert laws.composed_phi_pgf(0.3, 1, p) == pytest.approx(laws.composed_tau_pgf(0.3, 1, p), rel=1e-12)
    assert laws.composed_phi_pgf(1 - 1e-12, 3, CompositionParams(1.0, 2.0, 0.7)) == pytest.approx(1.0, abs=1e-6)


def test_products():
    for eta in (1.5, 2.0, 3.0):
        assert laws.product_mellin(eta, 1.0, 1.0, laws.bernoulli_mellin(0.6)) == pytest.approx(math.exp(-0.4))
    with pytest.raises(ValueError):
        # the atom at zero makes negative moments infinite
        laws.product_mellin(0.5, 1.0, 1.0, laws.bernoulli_mellin(0.6))
    assert laws.product_mellin(1.0, 2.0, 1.3, laws.lognormal_mellin(0.2, 0.5)) == 1.0
    assert laws.product_covariance(0.5, 1.0, 1.0, 0.0, 1.0) == pytest.approx(2 * math.sinh(0.5) * math.exp(-1))
    assert laws.product_covariance(0.0, 1.0, 1.0, 0.0, 1.0) == 0.0
    single = laws.stable_mellin(0.7)
    double = laws.k_fold_mellin(single, 2)
    assert double(0.6) == pytest.approx(single(0.6) ** 2)
    assert laws.product_mellin(0.6, 1.5, 1.0, double) == pytest.approx(
        math.exp(1.5 * (single(-0.4) ** 2 - 1.0)), rel=1e-14)


def test_compound_poisson():
    jump = laws.JumpLaw.poisson(1.5)
    mean, var = laws.compound_poisson_moments(2.0, jump)
    assert (mean, var) == pytest.approx((3.0, 2.0 * (1.5 + 1.5 ** 2)))
    assert laws.compound_poisson_pgf(0.4, 2.0, jump) == pytest.approx(
        laws.iterated_poisson_pgf(0.4, CompositionParams(1.5, 2.0, 1.0, 1.0)))


def test_cfrac():
    assert laws.cfrac_scale(2) == 2.0 and laws.cfrac_scale(3) == 1.5
    phi = (1 + math.sqrt(5)) / 2
    assert abs(laws.cfrac_scale(40) - phi) < 1e-12
    for n in range(1, 31):
        assert laws.cfrac_scale_expansion(n) == pytest.approx(laws.cfrac_scale(n), rel=1e-12)
    assert laws.cfrac_charfn(0.0, 1.0, 1.0) == 1.0
    assert laws.cfrac_charfn(1.0, 200.0, 1.0) == pytest.approx(math.exp(-phi), rel=1e-12)
    for beta in (0.5, 1.0, 2.0):
        assert laws.cfrac_charfn_product(beta, 2.0, 1.0) == pytest.approx(laws.cfrac_charfn(beta, 2.0, 1.0), rel=1e-12)
    assert laws.cfrac_mixture_density(0.0, 200.0, 1.0) == pytest.approx(1 / (math.pi * phi), rel=1e-9)
    f = lambda x: laws.cfrac_mixture_density(x, 2.0, 1.0)  # noqa: E731
    assert 2 * integrate.quad(f, 0, math.inf, limit=200)[0] == pytest.approx(1.0, abs=1e-6)
    assert f(1.7) == f(-1.7)
    assert laws.cfrac_mixture_cdf(0.0, 2.0, 1.0) == pytest.approx(0.5)

