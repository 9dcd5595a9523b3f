"""Random continued fractions of i.i.d. standard Cauchy variables with a Poisson depth."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..specfun import DEFAULT_ACCURACY, FIB_EXACT_MAX, GOLDEN_RATIO, SeriesAccuracy, fibonacci_ratio

SQRT5 = math.sqrt(5.0)
# ratio (1 - phi) / phi of the two Binet roots
BINET_RATIO = (1.0 - GOLDEN_RATIO) / GOLDEN_RATIO


def cfrac_scale(n: int) -> float:
    """Cauchy scale ``F_{n+1}/F_n`` of the depth-``n`` fraction; depth 0 is taken as scale 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    return fibonacci_ratio(n)


def cfrac_scale_expansion(n: int, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``phi + sqrt5 sum_{j>=1} r^{nj}`` with ``r = (1-phi)/phi``; equals ``F_{n+1}/F_n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = BINET_RATIO ** n
    total = 0.0
    term = q
    while abs(term) > acc.rel_tol * 1e-4:
        total += term
        term *= q
    return GOLDEN_RATIO + SQRT5 * total


def _depth_weights(t: float, lam: float):
    """Poisson(lam t) weights for depths ``0..FIB_EXACT_MAX`` and the lumped remainder."""
    depths = np.arange(FIB_EXACT_MAX + 1)
    weights = stats.poisson.pmf(depths, lam * t)
    rest = float(stats.poisson.sf(FIB_EXACT_MAX, lam * t))
    scales = np.array([cfrac_scale(int(n)) for n in depths])
    # past the exact range every depth has scale phi to double precision
    return np.append(scales, GOLDEN_RATIO), np.append(weights, rest)


def cfrac_mixture_density(x: float, t: float, lam: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Density of the depth-``N(t)`` fraction: a Poisson mixture of Cauchy laws."""
    if t <= 0 or lam <= 0:
        raise ValueError("t and lam must be positive")
    scales, weights = _depth_weights(t, lam)
    return float(np.dot(weights, scales / (np.pi * (x * x + scales * scales))))


def cfrac_charfn(beta: float, t: float, lam: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``E e^{i beta X} = sum_n e^{-|beta| F_{n+1}/F_n} Pr{N(t) = n}``."""
    if t <= 0 or lam <= 0:
        raise ValueError("t and lam must be positive")
    scales, weights = _depth_weights(t, lam)
    return float(np.dot(weights, np.exp(-abs(beta) * scales)))


def _product_factor(beta: float, n: int, acc: SeriesAccuracy) -> float:
    """``e^{-|beta| phi} prod_{j>=1} e^{-|beta| sqrt5 r^{nj}}`` multiplied factor by factor."""
    out = math.exp(-abs(beta) * GOLDEN_RATIO)
    q = BINET_RATIO ** n
    power = q
    while abs(power) > acc.rel_tol * 1e-4:
        out *= math.exp(-abs(beta) * SQRT5 * power)
        power *= q
    return out


def cfrac_charfn_product(beta: float, t: float, lam: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Characteristic function in the golden-ratio product form."""
    if t <= 0 or lam <= 0:
        raise ValueError("t and lam must be positive")
    _, weights = _depth_weights(t, lam)
    factors = [math.exp(-abs(beta))] + [_product_factor(beta, n, acc) for n in range(1, FIB_EXACT_MAX + 1)]
    factors.append(math.exp(-abs(beta) * GOLDEN_RATIO))
    return float(np.dot(weights, factors))


def cauchy_cdf(x, scale):
    return 0.5 + np.arctan(np.asarray(x) / scale) / np.pi


def cfrac_mixture_cdf(x, t: float, lam: float):
    """Vectorised cdf of the depth-``N(t)`` fraction."""
    if t <= 0 or lam <= 0:
        raise ValueError("t and lam must be positive")
    scales, weights = _depth_weights(t, lam)
    x = np.asarray(x, dtype=float)
    keep = weights > 0
    out = np.full(x.shape, 0.5)
    for s, w in zip(scales[keep], weights[keep]):
        out += w * np.arctan(x / s) / np.pi
    return out
