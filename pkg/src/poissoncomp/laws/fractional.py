"""Laws built on the fractional Poisson process, its inverse times and fractional birth processes."""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
from scipy import integrate

from ..errors import NonConvergence, PrecisionLoss
from ..specfun import (DEFAULT_ACCURACY, SeriesAccuracy, _coefficients, _guarded_sum_mp, _max_log_term,
                       _prabhakar_mp, extended_precision,
                       generalized_ml, guarded_sum, mittag_leffler)
from .base import BirthRates, CompositionParams, PmfTable

# ratio max|term| / |result| beyond which an alternating sum is flagged
LOSS_THRESHOLD = 1e8
# cancellation level at which a float sum is redone in extended precision
_REFINE_THRESHOLD = 1e3
# sums of Mittag-Leffler values start from ~1e-13 relative accuracy, so they refine sooner
_MIXTURE_REFINE_THRESHOLD = 10.0
# series of the tau-composed law is only used well inside its convergence disc
_SERIES_MAX_SCALE = 0.9


def _loss_dps(max_abs: float, value: float) -> int:
    lost = math.log10(max_abs / abs(value)) if value else 30.0
    return 30 + max(0, int(lost))


# fractional Poisson process and the inverse times tau_k

def frac_poisson_pmf(m: int, t: float, nu: float, lambda_beta: float,
                     acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """State probabilities of the fractional Poisson process of order ``nu``.

    ``x^m E^{m+1}_{nu, nu m + 1}(-x)`` with ``x = lambda_beta t^nu``.
    """
    if m < 0:
        return 0.0
    if t == 0.0:
        return 1.0 if m == 0 else 0.0
    x = lambda_beta * t ** nu
    if m == 0:
        return mittag_leffler(nu, 1.0, -x, acc)
    return math.exp(m * math.log(x)) * generalized_ml(nu, nu * m + 1.0, m + 1.0, -x, acc)


def frac_poisson_table(t: float, nu: float, lambda_beta: float, tail_tol: float = 1e-10,
                       acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda m: frac_poisson_pmf(m, t, nu, lambda_beta, acc),
                                  tail_tol=tail_tol, law="fractional poisson")


def tau_density(k: int, s: float, nu: float, lambda_beta: float,
                acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Density of ``tau_k``, the first time the fractional Poisson process reaches ``k``.

    ``lambda_beta^k s^{nu k - 1} E^k_{nu, nu k}(-lambda_beta s^nu)``; Erlang for ``nu = 1``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if s <= 0:
        raise ValueError("s must be positive")
    x = lambda_beta * s ** nu
    return math.exp(k * math.log(lambda_beta) + (nu * k - 1.0) * math.log(s)) \
        * generalized_ml(nu, nu * k, float(k), -x, acc)


def tau_cdf(k: int, s: float, nu: float, lambda_beta: float,
            acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{tau_k <= s} = x^k E^k_{nu, nu k + 1}(-x)`` with ``x = lambda_beta s^nu``."""
    if s <= 0:
        return 0.0
    x = lambda_beta * s ** nu
    return math.exp(k * math.log(x)) * generalized_ml(nu, nu * k + 1.0, float(k), -x, acc)


def tau_laplace(k: int, mu: float, nu: float, lambda_beta: float) -> float:
    """``E e^{-mu tau_k} = (mu^nu / lambda_beta + 1)^{-k}``."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    return math.exp(-k * math.log1p(mu ** nu / lambda_beta))


def rescaled_tau_laplace(k: int, t: float, mu: float, nu: float, lambda_beta: float) -> float:
    """Laplace transform of ``tau_k`` sampled at ``k^{1/nu}``-rescaled time: ``(1 + lambda_beta t mu^nu / k)^{-k}``.

    Tends to the stable transform ``exp(-lambda_beta t mu^nu)`` as ``k`` grows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.exp(-k * math.log1p(lambda_beta * t * mu ** nu / k))


# Poisson process read at tau_k: discrete Linnik / Mittag-Leffler laws

def _linnik_series_term_log(j, r, k, nu, logc):
    a = nu * (k + j)
    return (math.lgamma(k + j) - math.lgamma(k) - math.lgamma(j + 1.0) + (k + j) * logc
            + math.lgamma(a + r) - math.lgamma(a) - math.lgamma(r + 1.0))


def _linnik_series(r, k, nu, c, acc):
    logc = math.log(c)

    def term(j):
        v = math.exp(_linnik_series_term_log(j, r, k, nu, logc))
        return -v if j % 2 else v

    total, max_abs = guarded_sum(term, acc, name="composed tau series")
    if max_abs <= _REFINE_THRESHOLD * abs(total):
        return total
    dps = _loss_dps(max_abs, total)
    for _ in range(4):
        with extended_precision(dps):
            value, big = _linnik_series_mp(r, k, nu, c, acc, dps)
            lost = float(mpmath.log10(big / abs(value))) if value else dps
            if lost < dps - 20:
                return float(value)
        dps = int(lost) + 40
    raise NonConvergence("composed tau series: cancellation not resolved")


def _linnik_series_mp(r, k, nu, c, acc, dps):
    with extended_precision(dps):
        logc = mpmath.log(mpmath.mpf(c))
        nu_ = mpmath.mpf(nu)
        total = mpmath.mpf(0)
        big = mpmath.mpf(0)
        small = 0
        prev = mpmath.inf
        tol = mpmath.mpf(acc.rel_tol) * mpmath.mpf("1e-3")
        lg = mpmath.loggamma
        base = -lg(k) - lg(r + 1)
        for j in range(acc.max_terms):
            a = nu_ * (k + j)
            mag = mpmath.exp(base + lg(k + j) - lg(j + 1) + (k + j) * logc + lg(a + r) - lg(a))
            total += -mag if j % 2 else mag
            big = max(big, mag)
            if mag <= prev and mag < tol * abs(total):
                small += 1
                if small >= 3:
                    return total, big
            else:
                small = 0
            prev = mag
    raise NonConvergence("composed tau series (extended precision) did not converge")


def _linnik_quadrature(r, k, nu, c, acc):
    """``c^k / r! int_0^inf e^{-w} w^{r + nu k - 1} E^k_{nu, nu k}(-c w^nu) dw``."""
    shape = r + nu * k
    log_pre = k * math.log(c) - math.lgamma(r + 1.0)

    def smooth(w):
        return math.exp(log_pre - w) * generalized_ml(nu, nu * k, float(k), -c * w ** nu, acc)

    def full(w):
        return math.exp(log_pre - w + (shape - 1.0) * math.log(w)) \
            * generalized_ml(nu, nu * k, float(k), -c * w ** nu, acc)

    spread = 10.0 * math.sqrt(shape + 1.0)
    upper = shape + spread + 45.0
    opts = dict(epsabs=0.0, epsrel=1e-11, limit=400)
    # algebraic weight handles the w^{shape-1} behaviour at the origin
    head = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(shape - 1.0, 0.0), **opts)[0]
    points = sorted({p for p in (max(1.0, shape - spread), max(1.0, shape), shape + spread) if 1.0 < p < upper})
    tail = integrate.quad(full, 1.0, upper, points=points or None, **opts)[0]
    return head + tail


@lru_cache(maxsize=8192)
def _linnik_pmf(r, k, nu, c, acc):
    if c < _SERIES_MAX_SCALE:
        try:
            return max(0.0, _linnik_series(r, k, nu, c, acc))
        except NonConvergence:
            pass
    return max(0.0, _linnik_quadrature(r, k, nu, c, acc))


def composed_tau_pmf(r: int, k: int, p: CompositionParams,
                     acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{N_alpha(tau_k) = r}``.

    Summed as an alternating series in ``c = lambda_beta / lambda_alpha^nu`` when
    ``c`` is well inside the unit disc, otherwise by quadrature of the Poisson
    kernel against the density of ``tau_k``.
    """
    if r < 0:
        return 0.0
    if k < 1:
        raise ValueError("k must be >= 1")
    return _linnik_pmf(int(r), int(k), float(p.nu), float(p.linnik_scale), acc)


def composed_tau_table(k: int, p: CompositionParams, tail_tol: float = 1e-9, max_len: int = 5000,
                       acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda r: composed_tau_pmf(r, k, p, acc), tail_tol=tail_tol,
                                  max_len=max_len, law="composed tau")


def composed_tau_pgf(u: float, k: int, p: CompositionParams) -> float:
    """``[1 + (1-u)^nu lambda_alpha^nu / lambda_beta]^{-k}``."""
    if abs(u) > 1:
        raise ValueError("|u| must not exceed 1")
    return math.exp(-k * math.log1p((1.0 - u) ** p.nu / p.linnik_scale))


def composed_tau_moments(k: int, p: CompositionParams):
    """Mean and variance of ``N_alpha(tau_k)`` for ``nu = 1`` (negative binomial)."""
    if p.nu != 1.0:
        return math.inf, math.inf
    la, lb = p.lambda_alpha, p.lambda_beta
    return k * la / lb, k * la * (la + lb) / lb ** 2


def dml_pmf(r: int, nu: float, c: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Discrete Mittag-Leffler pmf with pgf ``1 / (1 + (1-u)^nu / c)``."""
    if c <= 0:
        raise ValueError("c must be positive")
    if r < 0:
        return 0.0
    return _linnik_pmf(int(r), 1, float(nu), float(c), acc)


def dml_table(nu: float, c: float, tail_tol: float = 1e-9, max_len: int = 5000,
              acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda r: dml_pmf(r, nu, c, acc), tail_tol=tail_tol,
                                  max_len=max_len, law="discrete mittag-leffler")


def negative_binomial_pmf(r: int, k: float, q: float) -> float:
    """``C(k+r-1, r) (1-q)^k q^r``."""
    if r < 0:
        return 0.0
    return math.exp(math.lgamma(k + r) - math.lgamma(k) - math.lgamma(r + 1.0)
                    + k * math.log1p(-q) + r * math.log(q))


# Poisson-logarithmic decomposition of the nu = 1 law

def negbin_decomposition_params(k: int, lambda_alpha: float, lambda_beta: float):
    """Poisson rate and logarithmic parameter of the random sum equal in law to ``N_alpha(tau_k)``, nu = 1."""
    if lambda_alpha < 0 or lambda_beta <= 0:
        raise ValueError("rates must be positive")
    mu = k * math.log1p(lambda_alpha / lambda_beta)
    return mu, lambda_alpha / (lambda_alpha + lambda_beta)


def logarithmic_pmf(r: int, q: float) -> float:
    """``-q^r / (r ln(1-q))`` on ``r >= 1``."""
    if r < 1:
        return 0.0
    return -math.exp(r * math.log(q)) / (r * math.log1p(-q))


def logarithmic_mean(q: float) -> float:
    return -q / ((1.0 - q) * math.log1p(-q))


# Yule process read at tau_k

def _alternating_fsum(terms_mp, extended, name):
    """Sum signed mpf terms; float path first, mp when cancellation is heavy."""
    floats = [float(x) for x in terms_mp]
    big = max(abs(x) for x in floats)
    if math.isfinite(big):
        value = math.fsum(floats)
        loss = big / abs(value) if value else math.inf
    else:
        # terms beyond the float range
        value, loss = math.nan, math.inf
    if loss <= _REFINE_THRESHOLD:
        return value
    if not extended and loss > LOSS_THRESHOLD:
        raise PrecisionLoss(f"{name}: cancellation ratio {loss:.3g} exceeds {LOSS_THRESHOLD:g}")
    return float(mpmath.fsum(terms_mp))


def yule_tau_pmf(r: int, k: int, p: CompositionParams, extended: bool = True) -> float:
    """``Pr{Y_alpha(tau_k) = r}`` for a linear birth process started from one individual.

    ``sum_{h=1}^r C(r-1, h-1) (-1)^{h-1} [1 + h^nu lambda_alpha^nu / lambda_beta]^{-k}``.
    With ``extended=False`` heavy cancellation raises :class:`PrecisionLoss`
    instead of being resolved in extended precision.
    """
    if r < 1:
        return 0.0
    a = p.lambda_alpha ** p.nu / p.lambda_beta
    # binomials grow like 2^r; carry enough digits to survive the cancellation
    dps = 30 + int(0.31 * r)
    with extended_precision(dps):
        a_ = mpmath.mpf(a)
        nu_ = mpmath.mpf(p.nu)
        terms = [(-1) ** (h - 1) * mpmath.binomial(r - 1, h - 1) * (1 + mpmath.power(h, nu_) * a_) ** (-k)
                 for h in range(1, r + 1)]
        return max(0.0, _alternating_fsum(terms, extended, "Yule-at-tau pmf"))


def yule_tau_table(k: int, p: CompositionParams, tail_tol: float = 1e-9, max_len: int = 2000) -> PmfTable:
    """Tabulated law; heavy tails stop at ``max_len`` with the remainder in ``tail_bound``."""
    return PmfTable.from_function(lambda r: yule_tau_pmf(r, k, p), offset=1, tail_tol=tail_tol,
                                  max_len=max_len, law="yule at tau")


def _yule_g(h, k, nu, a):
    return math.exp(-k * math.log1p(h ** nu * a))


def _yule_euler(w, k, nu, a, acc):
    """Euler transform of ``sum_{h>=1} (-1)^{h-1} w^h g(h)`` for ``1 <= w < 3``."""
    nmax = 400
    dps = 40 + int(nmax * math.log10(1.0 + w))
    with extended_precision(dps):
        w_, a_, nu_ = mpmath.mpf(w), mpmath.mpf(a), mpmath.mpf(nu)
        b = [None] + [w_ ** h * (1 + mpmath.power(h, nu_) * a_) ** (-k) for h in range(1, nmax + 2)]
        total = mpmath.mpf(0)
        small = 0
        for n in range(nmax):
            diff = mpmath.fsum((-1) ** i * mpmath.binomial(n, i) * b[1 + i] for i in range(n + 1))
            term = diff / mpmath.mpf(2) ** (n + 1)
            total += term
            if abs(term) < acc.rel_tol * abs(total):
                small += 1
                if small >= 3:
                    return float(total)
            else:
                small = 0
    raise NonConvergence("Euler-transformed Yule pgf did not converge")


def yule_tau_pgf(u: float, k: int, p: CompositionParams, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Pgf of ``Y_alpha(tau_k)`` through its series in ``w = u/(1-u)``.

    Plain alternating series for ``|w| < 1``, Euler transformation for
    ``1 <= w < 3``, and direct summation of the pmf beyond.
    """
    if abs(u) >= 1:
        raise ValueError("|u| must be < 1")
    if u == 0.0:
        return 0.0
    a = p.lambda_alpha ** p.nu / p.lambda_beta
    w = u / (1.0 - u)
    if abs(w) < 1.0:
        def term(h):
            if h == 0:
                return 0.0
            v = w ** h * _yule_g(h, k, p.nu, a)
            return -v if h % 2 == 0 else v
        total, _ = guarded_sum(term, acc, name="Yule-at-tau pgf")
        return total
    if w < 3.0:
        return _yule_euler(w, k, p.nu, a, acc)

    def direct(r):
        return u ** r * yule_tau_pmf(r, k, p) if r >= 1 else 0.0
    total, _ = guarded_sum(direct, acc, name="Yule-at-tau pgf (direct)")
    return total


def yule_tau_moments(k: int, p: CompositionParams):
    """Mean and variance of ``Y_alpha(tau_k)`` for ``nu = 1``; infinite where they diverge.

    Uses ``E Y(s) = e^{lambda s}`` and ``E Y(s)^2 = 2 e^{2 lambda s} - e^{lambda s}``
    integrated against the Erlang law of ``tau_k``.
    """
    if p.nu != 1.0:
        return math.inf, math.inf
    la, lb = p.lambda_alpha, p.lambda_beta
    if lb <= la:
        return math.inf, math.inf
    m1 = (lb / (lb - la)) ** k
    if lb <= 2 * la:
        return m1, math.inf
    m2 = 2.0 * (lb / (lb - 2 * la)) ** k - m1
    return m1, m2 - m1 * m1


# nonlinear fractional birth process and the random sum it indexes

def _birth_partial_fractions(k, rates, t, nu, acc):
    lam = rates.rates[:k]
    surv = [mittag_leffler(nu, 1.0, -l * t ** nu, acc) for l in lam]
    terms = []
    for m in range(k):
        denom = math.prod(lam[l] - lam[m] for l in range(k) if l != m)
        terms.append(surv[m] / denom)
    return lam, surv, terms


def frac_birth_pmf(k: int, t: float, nu: float, rates: BirthRates,
                   acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{Y(t) = k}`` for the fractional pure birth process with rates ``lambda_1..lambda_K``."""
    if not 1 <= k <= len(rates):
        raise ValueError(f"k must lie in 1..{len(rates)}")
    if t <= 0:
        return 1.0 if k == 1 else 0.0
    lam, surv, terms = _birth_partial_fractions(k, rates, t, nu, acc)
    if k == 1:
        return surv[0]
    scale = math.prod(lam[:k - 1])
    value = math.fsum(terms)
    big = max(abs(x) for x in terms)
    if value and big <= _MIXTURE_REFINE_THRESHOLD * abs(value):
        return max(0.0, scale * value)
    dps = 16 * ((40 + (int(math.log10(big / abs(value))) if value else 30)) // 16 + 1)
    with extended_precision(dps):
        lam_ = [mpmath.mpf(x) for x in lam]
        surv_ = [_ml_mp(nu, 1.0, -x * t ** nu, dps, acc) for x in lam]
        acc_mp = mpmath.fsum(surv_[m] / mpmath.fprod(lam_[l] - lam_[m] for l in range(k) if l != m)
                             for m in range(k))
        return max(0.0, float(mpmath.fprod(lam_[:k - 1]) * acc_mp))


def frac_birth_table(t: float, nu: float, rates: BirthRates,
                     acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    """Law on ``1..K``; the mass beyond the last rate goes to ``tail_bound``."""
    probs = [frac_birth_pmf(k, t, nu, rates, acc) for k in range(1, len(rates) + 1)]
    return PmfTable(1, probs, max(0.0, 1.0 - math.fsum(probs)), {"law": "fractional birth"})


def frac_linear_birth_pmf(k: int, t: float, nu: float, lambda_beta: float,
                          acc: SeriesAccuracy = DEFAULT_ACCURACY, extended: bool = True) -> float:
    """Fractional Yule law ``sum_j C(k-1, j-1) (-1)^{j-1} E_nu(-lambda_beta j t^nu)``."""
    if k < 1:
        return 0.0
    if t <= 0:
        return 1.0 if k == 1 else 0.0
    x = lambda_beta * t ** nu

    def value_at(j, dps):
        if dps is None:
            return mittag_leffler(nu, 1.0, -j * x, acc)
        return _ml_mp(nu, 1.0, -j * x, dps, acc)

    return max(0.0, _signed_mixture(k, value_at, extended, "linear birth pmf", acc,
                                    coef=lambda j: math.comb(k - 1, j - 1)))


def composed_birth_pmf(n: int, t: float, nu: float, rates: BirthRates, lambda_alpha: float,
                       acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{sum_{j <= Y(t)} X_j = n}`` with Poisson(lambda_alpha) jumps, truncated at ``K``."""
    if n < 0:
        return 0.0
    out = 0.0
    for r in range(1, len(rates) + 1):
        mean = lambda_alpha * r
        out += math.exp(n * math.log(mean) - math.lgamma(n + 1.0) - mean) * frac_birth_pmf(r, t, nu, rates, acc)
    return out


def composed_birth_pgf(u: float, t: float, nu: float, rates: BirthRates, lambda_alpha: float,
                       acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``sum_r (e^{lambda_alpha (u-1)})^r Pr{Y(t) = r}`` over the available rates."""
    if abs(u) > 1:
        raise ValueError("|u| must not exceed 1")
    g = math.exp(lambda_alpha * (u - 1.0))
    return math.fsum(g ** r * frac_birth_pmf(r, t, nu, rates, acc) for r in range(1, len(rates) + 1))


# inverse of the fractional linear birth process

_ML_MP_CACHE: dict = {}
_ML_MP_CACHE_MAX = 50_000


def _ml_mp(nu, beta, z, dps, acc):
    """Mittag-Leffler value as an mpf carrying at least ``dps`` correct digits.

    The precision is rounded up to a power-of-two ladder and the value cached
    per ladder level, so results never depend on the order of earlier calls.
    """
    level = 32 * 2 ** max(0, math.ceil(math.log2(dps / 32)))
    key = (nu, beta, z, level, acc)
    value = _ML_MP_CACHE.get(key)
    if value is None:
        if len(_ML_MP_CACHE) >= _ML_MP_CACHE_MAX:
            _ML_MP_CACHE.clear()
        value = _ML_MP_CACHE[key] = _ml_mp_eval(nu, beta, z, level, acc)
    return value


def _ml_mp_eval(nu, beta, z, dps, acc):
    if z == 0.0:
        with extended_precision(dps):
            return mpmath.rgamma(mpmath.mpf(beta))
    # the alternating series loses as many digits as its largest term has
    extra = _max_log_term(nu, beta, 1.0, -z) / math.log(10.0) if z < 0 else 0.0
    # a power-of-two ladder keeps the number of cached coefficient tables small
    work = 32 * 2 ** max(0, math.ceil(math.log2((dps + max(0, int(extra)) + 24) / 32)))
    coeffs = _coefficients(nu, beta, 1.0, work)
    with extended_precision(work):
        zz = mpmath.mpf(z)
        powers = [mpmath.mpf(1)]

        def term(r):
            while len(powers) <= r:
                powers.append(powers[-1] * zz)
            return coeffs[r] * powers[r]

        total, _ = _guarded_sum_mp(term, mpmath.mpf(10) ** (-dps - 5), acc.max_terms, "Mittag-Leffler series")
        return total


def _signed_mixture(k, value_at, extended, name, acc, coef=None):
    """``sum_{l=1}^k coef(l) (-1)^{l-1} value_at(l)``, refined in extended precision if it cancels.

    ``coef`` defaults to ``C(k, l)``.  ``value_at(l, dps)`` returns a float when
    ``dps`` is None and an mpf otherwise.
    """
    if coef is None:
        coef = lambda l: math.comb(k, l)  # noqa: E731
    terms = [(-1) ** (l - 1) * coef(l) * value_at(l, None) for l in range(1, k + 1)]
    value = math.fsum(terms)
    big = max(abs(x) for x in terms)
    if big == 0.0:
        return 0.0
    loss = big / abs(value) if value else math.inf
    if loss <= _MIXTURE_REFINE_THRESHOLD:
        return value
    if not extended:
        if loss > LOSS_THRESHOLD:
            raise PrecisionLoss(f"{name}: cancellation ratio {loss:.3g} exceeds {LOSS_THRESHOLD:g}")
        return value
    # rounded so that neighbouring calls share cached Mittag-Leffler values
    dps = 16 * ((30 + (int(math.log10(loss)) if value else 30)) // 16 + 1)
    for _ in range(4):
        with extended_precision(dps):
            mp_terms = [(-1) ** (l - 1) * coef(l) * value_at(l, dps) for l in range(1, k + 1)]
            total = mpmath.fsum(mp_terms)
            if total != 0 and dps - 20 > mpmath.log10(max(abs(x) for x in mp_terms) / abs(total)):
                return float(total)
        dps *= 2
    raise PrecisionLoss(f"{name}: cancellation not resolved in extended precision")


def phi_density(k: int, t: float, nu: float, lambda_beta: float,
                acc: SeriesAccuracy = DEFAULT_ACCURACY, extended: bool = True) -> float:
    """Density of ``phi_k``, the time the fractional linear birth process first exceeds ``k``.

    With ``extended=False`` heavy cancellation raises :class:`PrecisionLoss`.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if t <= 0:
        raise ValueError("t must be positive")
    x = lambda_beta * t ** nu

    def value_at(l, dps):
        if dps is None:
            return lambda_beta * l * t ** (nu - 1.0) * mittag_leffler(nu, nu, -l * x, acc)
        return mpmath.mpf(lambda_beta) * l * mpmath.mpf(t) ** (nu - 1.0) * _ml_mp(nu, nu, -l * x, dps, acc)

    return max(0.0, _signed_mixture(k, value_at, extended, "phi density", acc))


def phi_cdf(k: int, t: float, nu: float, lambda_beta: float,
            acc: SeriesAccuracy = DEFAULT_ACCURACY, extended: bool = True) -> float:
    """``Pr{phi_k <= t} = sum_{l=0}^k C(k,l) (-1)^l E_nu(-lambda_beta l t^nu)``."""
    if t <= 0:
        return 0.0
    x = lambda_beta * t ** nu

    # written as sum_l C(k,l)(-1)^{l-1} [1 - E(-l x)] so that small t keeps its digits
    def value_at(l, dps):
        if dps is None:
            return 1.0 - mittag_leffler(nu, 1.0, -l * x, acc)
        return 1 - _ml_mp(nu, 1.0, -l * x, dps, acc)

    return min(1.0, max(0.0, _signed_mixture(k, value_at, extended, "phi cdf", acc)))


def phi_survival_tail(k: int, t: float, nu: float, lambda_beta: float) -> float:
    """Leading large-``t`` term of ``Pr{phi_k > t}`` for ``nu < 1``: ``H_k / (lambda_beta Gamma(1-nu) t^nu)``."""
    harmonic = math.fsum(1.0 / l for l in range(1, k + 1))
    return harmonic / (lambda_beta * math.gamma(1.0 - nu) * t ** nu)


def composed_phi_pgf(u: float, k: int, p: CompositionParams) -> float:
    """``k! Gamma(a+1) / Gamma(a+1+k)``, ``a = lambda_alpha^nu (1-u)^nu / lambda_beta``."""
    if abs(u) >= 1:
        raise ValueError("|u| must be < 1")
    a = (1.0 - u) ** p.nu / p.linnik_scale
    return math.exp(math.lgamma(k + 1.0) + math.lgamma(a + 1.0) - math.lgamma(a + 1.0 + k))


def composed_phi_pmf(r: int, k: int, p: CompositionParams,
                     acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{N_alpha(phi_k) = r}`` as a signed mixture of discrete Mittag-Leffler laws."""
    if r < 0:
        return 0.0
    c = p.linnik_scale

    def value_at(l, dps):
        v = dml_pmf(r, p.nu, l * c, acc)
        return v if dps is None else mpmath.mpf(v)

    # the dml values carry double precision only, so refinement cannot recover more
    return max(0.0, _signed_mixture(k, value_at, False, "composed phi pmf", acc))


def composed_phi_table(k: int, p: CompositionParams, tail_tol: float = 1e-9, max_len: int = 5000,
                       acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda r: composed_phi_pmf(r, k, p, acc), tail_tol=tail_tol,
                                  max_len=max_len, law="composed phi")
