"""Multiplicative compound Poisson processes: products of i.i.d. factors over a Poisson count."""

from __future__ import annotations

import math
from typing import Callable


def product_mellin(eta: float, t: float, lam: float, jump_mellin: Callable[[float], float]) -> float:
    """``E N_pi(t)^{eta-1} = exp(lam t (E X^{eta-1} - 1))``.

    ``jump_mellin(s)`` returns ``E X^s`` of one factor.
    """
    m = jump_mellin(eta - 1.0)
    if not math.isfinite(m):
        raise ValueError(f"factor Mellin transform is not finite at {eta - 1.0}")
    return math.exp(lam * t * (m - 1.0))


def product_mean(t: float, lam: float, jump_mean: float) -> float:
    return math.exp(lam * t * (jump_mean - 1.0))


def product_second_moment(t: float, lam: float, jump_second: float) -> float:
    return math.exp(lam * t * (jump_second - 1.0))


def product_covariance(s: float, t: float, lam: float, jump_mean: float, jump_second: float) -> float:
    """``Cov(N_pi(s), N_pi(t)) = e^{lam t (m-1)} (e^{lam s (m2-m)} - e^{lam s (m-1)})`` for ``s <= t``."""
    if s < 0 or t < s:
        raise ValueError("need 0 <= s <= t")
    m, m2 = jump_mean, jump_second
    return math.exp(lam * t * (m - 1.0)) * (math.exp(lam * s * (m2 - m)) - math.exp(lam * s * (m - 1.0)))


def product_variance(t: float, lam: float, jump_mean: float, jump_second: float) -> float:
    return math.exp(lam * t * (jump_second - 1.0)) - math.exp(2.0 * lam * t * (jump_mean - 1.0))


def bernoulli_mellin(p: float) -> Callable[[float], float]:
    """``E X^s`` for a Bernoulli(p) factor, with ``0^0 = 1``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")

    def mellin(s):
        if s == 0:
            return 1.0
        if s < 0:
            return math.inf
        return p
    return mellin


def stable_mellin(nu: float) -> Callable[[float], float]:
    """``E X^s = Gamma(1 - s/nu) / Gamma(1 - s)`` for a positive stable factor, ``s < nu``.

    Same as ``(1/nu) Gamma(-s/nu) / Gamma(-s)`` away from ``s = 0``.
    """
    if not 0 < nu <= 1:
        raise ValueError("nu must lie in (0, 1]")

    def mellin(s):
        if s >= nu:
            return math.inf
        # both Gamma arguments are positive for s < nu <= 1
        return math.exp(math.lgamma(1.0 - s / nu) - math.lgamma(1.0 - s))
    return mellin


def lognormal_mellin(mu: float, sigma: float) -> Callable[[float], float]:
    """``E X^s = exp(s mu + s^2 sigma^2 / 2)`` for a lognormal factor."""
    return lambda s: math.exp(s * mu + 0.5 * s * s * sigma * sigma)


def k_fold_mellin(jump_mellin: Callable[[float], float], k: int) -> Callable[[float], float]:
    """Mellin transform of a product of ``k`` i.i.d. factors: ``(E zeta^s)^k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return lambda s: jump_mellin(s) ** k
