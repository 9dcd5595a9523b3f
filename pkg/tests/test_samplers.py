import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from poissoncomp import laws, samplers
from poissoncomp.laws import BirthRates, CompositionParams, PmfTable, RateFunction
from poissoncomp.rng import DEFAULT_SEED, RngStream
from poissoncomp.specfun import fibonacci_ratio, ml_survival
from poissoncomp.verify.metrics import (Histogram, cauchy_scale_mle, frequency_error, mean_error, transform_error,
                                        tv_distance, tv_tolerance)

N = 100_000


def assert_law(samples, table, lump_tail=False):
    tv = tv_distance(Histogram.for_table(samples, table), table, lump_tail=lump_tail)
    assert tv <= tv_tolerance(table, len(samples)), tv


def within(err, units=4.0):
    assert abs(err.sigma_units) <= units, err


def test_rng_streams_are_reproducible_and_distinct():
    a = RngStream(7).random(5)
    assert np.array_equal(a, RngStream(7).random(5))
    assert not np.array_equal(a, RngStream(7, 1).random(5))
    parent = RngStream(7)
    assert np.array_equal(parent.spawn(3).random(4), RngStream(7).spawn(3).random(4))
    assert not np.array_equal(parent.spawn(3).random(4), parent.spawn(4).random(4))
    assert np.array_equal(RngStream.for_name(1, "mar").random(3), RngStream.for_name(1, "mar").random(3))
    assert RngStream().seed == DEFAULT_SEED
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2 ** 64)


def test_scalar_and_array_shapes():
    r = RngStream(1)
    assert isinstance(samplers.sample_tau(2, 0.7, 1.0, r), float)
    assert samplers.sample_tau(2, 0.7, 1.0, r, 3).shape == (3,)
    assert isinstance(samplers.sample_composition_terminal(1, 1, 1, r), int)


def test_cfrac_value_is_exact():
    x = np.array([[1.0, 2.0, 3.0], [2.0, -1.0, 4.0]])
    assert samplers.cfrac_value(x) == pytest.approx([1 + 3 / 7, 2 + 1 / (-1 + 0.25)])


def test_composition_terminal_and_random_sum():
    p = CompositionParams(1.0, 1.0, 1.0, 1.0)
    table = laws.iterated_poisson_table(p, tail_tol=1e-10)
    assert_law(samplers.sample_composition_terminal(1.0, 1.0, 1.0, RngStream(1), N), table)
    sums = samplers.sample_random_sum(samplers.poisson_draws(1.0), samplers.poisson_draws(1.0), RngStream(2), N)
    assert_law(sums, table)


def test_iterated_paths():
    paths = [samplers.sample_iterated_path(2.0, 1.5, 1.0, RngStream(3).spawn(i)) for i in range(4000)]
    for path in paths[:50]:
        assert np.all(np.diff(path.times) >= 0) and np.all(np.diff(path.levels) >= 0)
        assert path.value_at(1.0) == path.terminal
    terminal = np.array([path.terminal for path in paths])
    table = laws.iterated_poisson_table(CompositionParams(2.0, 1.5, 1.0, 1.0), tail_tol=1e-10)
    assert_law(terminal, table)


def test_poisson_paths_and_counts():
    counts = samplers.sample_poisson_count(2.0, 1.5, RngStream(4), N)
    within(mean_error("mean", counts, 3.0))
    path = samplers.sample_poisson_path(2.0, 50.0, RngStream(5))
    assert np.all(path.jump_sizes == 1) and path.terminal == len(path)
    assert np.all((path.times > 0) & (path.times <= 50.0))
    with pytest.raises(ValueError):
        samplers.JumpPath(np.array([1.0, 0.5]), np.array([1, 2]))


def test_nonhom_poisson_counts():
    rf = RateFunction.linear(2.0, 10.0)
    counts = samplers.sample_nonhom_count(rf, 1.5, RngStream(6), N)
    lam = rf.cumulative(1.5)
    assert lam == pytest.approx(2.25)
    table = PmfTable.from_function(lambda k: float(stats.poisson.pmf(k, lam)), tail_tol=1e-12)
    assert_law(counts, table)


def test_frac_poisson_counts():
    table = laws.frac_poisson_table(1.0, 0.6, 1.0, tail_tol=1e-10)
    assert_law(samplers.sample_frac_poisson_count(1.0, 0.6, 1.0, RngStream(7), N), table)


def test_ml_waiting_time_survival():
    w = samplers.sample_ml_waiting_time(0.7, 1.5, RngStream(8), N)
    for x in (0.1, 1.0, 5.0):
        within(frequency_error(f"survival at {x}", w > x, ml_survival(0.7, 1.5 * x ** 0.7)))


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8, 0.95])
def test_stable_laplace(nu):
    s = samplers.sample_stable_positive(nu, RngStream(9), N)
    assert np.all(s > 0)
    for mu in (0.5, 2.0):
        within(transform_error(f"laplace {mu}", s, "laplace", mu, math.exp(-mu ** nu)))


def test_stable_index_is_open_interval():
    with pytest.raises(ValueError):
        samplers.sample_stable_positive(1.0, RngStream(9), 3)


def test_tau_law():
    s = samplers.sample_tau(3, 0.6, 1.0, RngStream(10), N)
    for x in (0.5, 2.0, 10.0):
        within(frequency_error(f"cdf {x}", s <= x, laws.tau_cdf(3, x, 0.6, 1.0)))
    within(transform_error("laplace", s, "laplace", 1.0, laws.tau_laplace(3, 1.0, 0.6, 1.0)))


def test_discrete_linnik_laws():
    p = CompositionParams(1.0, 1.0, 0.7)
    table = laws.dml_table(0.7, p.linnik_scale, tail_tol=1e-9, max_len=120)
    assert_law(samplers.sample_dml(0.7, 1.0, 1.0, RngStream(11), N), table, lump_tail=True)
    q = CompositionParams(2.0, 0.5, 0.8)
    x = samplers.sample_composed_tau(2, q, RngStream(12), N)
    assert_law(x, laws.composed_tau_table(2, q, tail_tol=1e-9, max_len=120), lump_tail=True)


def test_yule_at_tau():
    p = CompositionParams(1.0, 1.0, 0.75)
    table = laws.yule_tau_table(2, p, max_len=60)
    assert_law(samplers.sample_yule_at_tau(2, p, RngStream(13), N), table, lump_tail=True)


def test_yule_counts_are_geometric():
    y = samplers.sample_yule_count(1.0, 1.0, RngStream(14), N)
    q = math.exp(-1.0)
    table = PmfTable.from_function(lambda k: q * (1 - q) ** (k - 1), offset=1, tail_tol=1e-12)
    assert_law(y, table)


def test_phi_law():
    x = samplers.sample_phi(2, 0.7, 1.0, RngStream(15), size=20_000)
    for t in (0.3, 1.0, 3.0):
        within(frequency_error(f"cdf {t}", x <= t, laws.phi_cdf(2, t, 0.7, 1.0)))


def test_frac_yule_counts():
    lin = BirthRates.linear(1.0, 40)
    table = PmfTable.from_function(lambda k: laws.frac_birth_pmf(k, 1.0, 0.8, lin), offset=1, max_len=40,
                                   tail_tol=1e-9)
    assert_law(samplers.sample_frac_yule_count(1.0, 0.8, 1.0, RngStream(16), N), table, lump_tail=True)


def test_logarithmic():
    x = samplers.sample_logarithmic(0.5, RngStream(17), N)
    table = PmfTable.from_function(lambda r: laws.logarithmic_pmf(r, 0.5), offset=1, tail_tol=1e-12)
    assert_law(x, table)
    with pytest.raises(ValueError):
        samplers.sample_logarithmic(1.0, RngStream(17), 3)


@pytest.mark.parametrize("depth", [1, 2, 3, 6])
def test_cfrac_scales(depth):
    mle = cauchy_scale_mle(samplers.sample_cfrac(depth, RngStream(18).spawn(depth), N))
    assert mle == pytest.approx(fibonacci_ratio(depth), rel=0.02)
    alt = cauchy_scale_mle(samplers.sample_cauchy_sum(depth, RngStream(19).spawn(depth), N))
    assert alt == pytest.approx(fibonacci_ratio(depth), rel=0.02)


def test_random_cfrac_charfn():
    x = samplers.sample_random_cfrac(2.0, 1.0, RngStream(20), N)
    within(transform_error("charfn", x, "charfn", 1.0, laws.cfrac_charfn(1.0, 2.0, 1.0)))


def test_products():
    x = samplers.sample_product(1.0, 1.0, samplers.bernoulli_draws(0.6), RngStream(21), N)
    within(mean_error("mean", x, math.exp(-0.4)))
    a, b = samplers.sample_product_pair(0.5, 1.0, 1.0, samplers.normal_draws, RngStream(22), N)
    assert a.shape == b.shape == (N,)
    with pytest.raises(ValueError):
        samplers.sample_product_pair(1.0, 0.5, 1.0, samplers.normal_draws, RngStream(22), 3)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([0.4, 0.7, 1.0]))
def test_samplers_are_deterministic_per_seed(seed, nu):
    a = samplers.sample_frac_poisson_count(1.0, nu, 1.0, RngStream(seed), 50)
    b = samplers.sample_frac_poisson_count(1.0, nu, 1.0, RngStream(seed), 50)
    assert np.array_equal(a, b)
    assert np.all(a >= 0)
