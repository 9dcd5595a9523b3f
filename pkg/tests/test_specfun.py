import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from poissoncomp import specfun
from poissoncomp.errors import NonConvergence
from poissoncomp.specfun import SeriesAccuracy

nus = st.floats(0.3, 1.0)


def mp_ml(nu, beta, z, dps=60):
    """Power series at high precision, an oracle for moderate |z|."""
    with mpmath.workdps(dps):
        z = mpmath.mpf(z)
        return float(mpmath.nsum(lambda r: z ** r * mpmath.rgamma(nu * r + beta), [0, mpmath.inf]))


@given(st.floats(-30.0, 8.0))
def test_ml_order_one_is_exp(z):
    assert specfun.mittag_leffler(1.0, 1.0, z) == pytest.approx(math.exp(z), rel=1e-10)


@given(st.floats(0.0, 6.0))
def test_ml_half_is_scaled_erfc(x):
    assert specfun.mittag_leffler(0.5, 1.0, -x) == pytest.approx(special.erfcx(x), rel=1e-9)


@pytest.mark.parametrize("nu,beta,z", [(0.7, 1.0, -3.0), (0.6, 0.6, -2.5), (0.9, 1.3, 1.5), (0.4, 1.0, -8.0),
                                       (0.75, 0.75, -15.0), (0.5, 2.0, 2.0)])
def test_ml_against_high_precision_series(nu, beta, z):
    assert specfun.mittag_leffler(nu, beta, z) == pytest.approx(mp_ml(nu, beta, z), rel=1e-10)


@pytest.mark.parametrize("nu,x", [(0.7, 60.0), (0.5, 400.0), (0.9, 100.0), (0.3, 1e4)])
def test_ml_large_argument_against_mpmath(nu, x):
    # far tail, where the direct series is useless in floats
    with mpmath.workdps(40):
        # integral representation for E_nu(-x), 0 < nu < 1
        sn = math.sin(math.pi * nu)

        def integrand(r):
            return mpmath.exp(-r * x ** (1 / nu)) * r ** (nu - 1) * sn / (
                mpmath.pi * (r ** (2 * nu) + 2 * r ** nu * math.cos(math.pi * nu) + 1))

        ref = float(mpmath.quad(integrand, [0, 1e-6, 1e-3, 1, mpmath.inf]))
    assert specfun.ml_survival(nu, x) == pytest.approx(ref, rel=1e-8)


@settings(max_examples=40)
@given(nus, st.floats(0.0, 20.0), st.floats(0.0, 5.0))
def test_ml_survival_is_monotone(nu, x, dx):
    a, b = specfun.ml_survival(nu, x), specfun.ml_survival(nu, x + dx)
    assert 0.0 <= b <= a * (1 + 1e-12) + 1e-300 <= 1.0 + 1e-12


@given(nus, st.floats(0.5, 2.0))
def test_ml_at_zero(nu, beta):
    assert specfun.mittag_leffler(nu, beta, 0.0) == pytest.approx(1.0 / math.gamma(beta), rel=1e-14)


@settings(max_examples=30)
@given(nus, st.floats(-5.0, 2.0))
def test_generalized_ml_with_unit_pochhammer_reduces(nu, z):
    assert specfun.generalized_ml(nu, 1.0, 1.0, z) == pytest.approx(specfun.mittag_leffler(nu, 1.0, z),
                                                                     rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("xi,g,d,z", [(0.7, 1.0, 2.0, -1.5), (0.5, 0.5, 3.0, -0.8), (0.8, 1.2, 2.5, 0.6)])
def test_generalized_ml_against_series(xi, g, d, z):
    with mpmath.workdps(50):
        ref = float(mpmath.nsum(lambda r: mpmath.rf(d, r) / mpmath.factorial(r) * mpmath.mpf(z) ** r
                                * mpmath.rgamma(xi * r + g), [0, mpmath.inf]))
    assert specfun.generalized_ml(xi, g, d, z) == pytest.approx(ref, rel=1e-10)


def test_ml_rejects_bad_order():
    with pytest.raises(ValueError):
        specfun.mittag_leffler(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        specfun.mittag_leffler(1.5, 1.0, 1.0)


def test_guarded_sum_converges_and_fails_loudly():
    total, _ = specfun.guarded_sum(lambda r: 0.5 ** r)
    assert total == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(NonConvergence):
        specfun.guarded_sum(lambda r: 1.0 / (r + 1.0), SeriesAccuracy(1e-12, 1000))


@pytest.mark.parametrize("k", range(0, 11))
@pytest.mark.parametrize("x", [0.1, 1.0, 2.5, 5.0])
def test_bell_is_poisson_moment(k, x):
    # exact Stirling-number form as the oracle
    stirling = [[1]]
    for n in range(1, k + 1):
        row = [0] * (n + 1)
        for j in range(1, n + 1):
            row[j] = j * (stirling[n - 1][j] if j < n else 0) + stirling[n - 1][j - 1]
        stirling.append(row)
    exact = sum(s * x ** j for j, s in enumerate(stirling[k]))
    assert specfun.bell_polynomial(k, x) == pytest.approx(exact, rel=1e-10)


@given(st.integers(0, 8), st.floats(0.01, 5.0))
def test_bell_recurrence(k, x):
    # B_{k+1}(x) = x (B_k(x) + B_k'(x)), with B_k' from the binomial identity
    b = [specfun.bell_polynomial(j, x) for j in range(k + 2)]
    rhs = x * math.fsum(math.comb(k, j) * b[j] for j in range(k + 1))
    assert b[k + 1] == pytest.approx(rhs, rel=1e-10)


@given(st.floats(-3.0, 3.0), st.integers(0, 15))
def test_signed_binomial(a, j):
    assert float(specfun.signed_binomial(a, j)) == pytest.approx(float(mpmath.binomial(a, j)), rel=1e-10, abs=1e-12)


def test_fibonacci():
    assert [specfun.fibonacci(n) for n in range(1, 11)] == [1, 1, 2, 3, 5, 8, 13, 21, 34, 55]
    assert specfun.fibonacci_ratio(3) == 1.5
    assert specfun.fibonacci_ratio(60) == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)


def test_extended_precision_is_scoped():
    before = mpmath.mp.dps
    with specfun.extended_precision(60):
        assert mpmath.mp.dps == 60
    assert mpmath.mp.dps == before

