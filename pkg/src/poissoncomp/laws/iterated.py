"""Iterated and non-homogeneous Poisson compositions and their hitting times."""

from __future__ import annotations

import math

from scipy import stats

from ..errors import NonConvergence
from ..specfun import DEFAULT_ACCURACY, SeriesAccuracy, bell_polynomial, guarded_sum
from .base import CompositionParams, JumpLaw, PmfTable, RateFunction


def poisson_stopped_poisson_pmf(k: int, mean_count: float, jump_rate: float,
                                acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Pmf of a Poisson(mean_count)-indexed sum of Poisson(jump_rate) variables.

    Uses the Bell-polynomial closed form
    ``jump^k/k! exp(-m (1 - e^-jump)) B_k(m e^-jump)``.
    """
    if k < 0:
        return 0.0
    if mean_count == 0.0:
        return 1.0 if k == 0 else 0.0
    x = mean_count * math.exp(-jump_rate)
    bell = bell_polynomial(k, x, acc)
    if bell == 0.0:
        return 0.0
    return math.exp(k * math.log(jump_rate) - math.lgamma(k + 1.0)
                    - mean_count * (-math.expm1(-jump_rate)) + math.log(bell))


def iterated_poisson_pmf(k: int, p: CompositionParams, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{N_alpha(N_beta(t)) = k}``."""
    return poisson_stopped_poisson_pmf(k, p.lambda_beta * p.t, p.lambda_alpha, acc)


def iterated_poisson_table(p: CompositionParams, tail_tol: float = 1e-10,
                           acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda k: iterated_poisson_pmf(k, p, acc), tail_tol=tail_tol,
                                  law="iterated")


def iterated_poisson_pgf(u: float, p: CompositionParams) -> float:
    """``E u^{N_alpha(N_beta(t))} = exp(lambda_beta t (e^{lambda_alpha (u-1)} - 1))``."""
    if abs(u) > 1:
        raise ValueError("|u| must not exceed 1")
    return math.exp(p.lambda_beta * p.t * math.expm1(p.lambda_alpha * (u - 1.0)))


def iterated_poisson_moments(p: CompositionParams):
    """Mean and variance of the iterated Poisson process at time ``p.t``."""
    mean = p.lambda_alpha * p.lambda_beta * p.t
    return mean, p.lambda_alpha * (1.0 + p.lambda_alpha) * p.lambda_beta * p.t


def compound_poisson_pgf(u: float, mean_count: float, jump: JumpLaw) -> float:
    """Pgf of a Poisson(mean_count)-indexed sum of i.i.d. jumps with law ``jump``."""
    return math.exp(mean_count * (jump.pgf(u) - 1.0))


def compound_poisson_moments(mean_count: float, jump: JumpLaw):
    """Wald's identities for a Poisson-indexed random sum: mean and variance."""
    # Var N (E X)^2 + Var X E N, with Var N = E N for a Poisson index
    return mean_count * jump.mean, mean_count * jump.second_moment


def iterated_pmf_dde_residual(k: int, p: CompositionParams, h: float = 1e-4) -> float:
    """Residual of the forward equations of the iterated Poisson state probabilities.

    ``d/dt p_k = -lambda_beta p_k + lambda_beta e^{-lambda_alpha} sum_m lambda_alpha^m/m! p_{k-m}``
    with the derivative taken by a central difference of step ``h``.  At
    ``t = 0`` the residual of the initial condition ``p_k(0) = [k == 0]`` is
    returned instead.
    """
    if p.t == 0.0:
        return iterated_poisson_pmf(k, p) - (1.0 if k == 0 else 0.0)
    if p.t <= h:
        raise ValueError("t must exceed the difference step h")
    la, lb = p.lambda_alpha, p.lambda_beta

    def at(t):
        return CompositionParams(la, lb, p.nu, t)

    deriv = (iterated_poisson_pmf(k, at(p.t + h)) - iterated_poisson_pmf(k, at(p.t - h))) / (2.0 * h)
    conv = sum(la ** m / math.factorial(m) * iterated_poisson_pmf(k - m, p) for m in range(k + 1))
    rhs = -lb * iterated_poisson_pmf(k, p) + lb * math.exp(-la) * conv
    return deriv - rhs


def nonhom_composition_pgf(u: float, rf: RateFunction, lambda_alpha: float, t: float) -> float:
    """Pgf of ``N_alpha(M(t))`` for a non-homogeneous Poisson process ``M`` with rate ``rf``."""
    if abs(u) > 1:
        raise ValueError("|u| must not exceed 1")
    return math.exp(rf.cumulative(t) * math.expm1(lambda_alpha * (u - 1.0)))


def nonhom_composition_pmf(k: int, rf: RateFunction, lambda_alpha: float, t: float,
                           acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    return poisson_stopped_poisson_pmf(k, rf.cumulative(t), lambda_alpha, acc)


def reversed_composition_pgf(u: float, rf: RateFunction, lambda_alpha: float, t: float,
                             acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Pgf of ``M(N_alpha(t))``: the non-homogeneous process read at a Poisson time."""
    mean = lambda_alpha * t
    if mean == 0.0:
        return 1.0
    logm = math.log(mean)

    def term(r):
        return math.exp((u - 1.0) * rf.cumulative(r) + r * logm - math.lgamma(r + 1.0) - mean)

    # rising terms before the Poisson mode must not trigger the stop
    head = sum(term(r) for r in range(int(mean) + 1))
    tail, _ = guarded_sum(term, acc, start=int(mean) + 1, name="reversed composition pgf")
    return head + tail


def reversed_composition_mean(rf: RateFunction, lambda_alpha: float, t: float,
                              acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Mean of ``M(N_alpha(t))`` as ``sum_j [Lambda(j) - Lambda(j-1)] Pr{N_alpha(t) >= j}``."""
    mean = lambda_alpha * t
    if mean == 0.0:
        return 0.0
    total = 0.0
    prev_cum = rf.cumulative(0.0)
    for j in range(1, acc.max_terms + 1):
        cum = rf.cumulative(float(j))
        tail = stats.poisson.sf(j - 1, mean)
        term = (cum - prev_cum) * tail
        total += term
        prev_cum = cum
        if j > mean and tail < acc.rel_tol and abs(term) < acc.rel_tol * abs(total):
            return total
    raise NonConvergence("reversed composition mean: rate grows faster than the Poisson tail decays")


def _level_difference_log(j: int, k: int) -> float:
    """log((j+1)^k - j^k) without cancellation."""
    if j == 0:
        return 0.0
    return k * math.log(j) + math.log(math.expm1(k * math.log1p(1.0 / j)))


def hitting_time_density(k: int, s: float, p: CompositionParams,
                         acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Density at ``s > 0`` of the first passage of ``N_alpha(N_beta(.))`` through level ``k``.

    The law is defective: it integrates to :func:`hitting_time_total_mass`.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if s <= 0:
        raise ValueError("s must be positive")
    la, lb = p.lambda_alpha, p.lambda_beta
    x = lb * s
    logx = math.log(x)
    log_pre = math.log(lb) - la + k * math.log(la) - math.lgamma(k + 1.0)

    def term(j):
        return math.exp(log_pre - x - la * j + _level_difference_log(j, k) + j * logx - math.lgamma(j + 1.0))

    head = sum(term(j) for j in range(int(x) + 1))
    tail, _ = guarded_sum(term, acc, start=int(x) + 1, name="hitting-time density")
    return head + tail


def hitting_time_total_mass(k: int, lambda_alpha: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{T_k < inf}``: probability that the iterated Poisson process ever visits level ``k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    la = lambda_alpha
    log_pre = -la + k * math.log(la) - math.lgamma(k + 1.0)

    def term(j):
        return math.exp(log_pre - la * j + _level_difference_log(j, k))

    # (j+1)^k - j^k grows polynomially; skip to the decaying regime before guarding
    peak = int((k - 1) / la) + 1
    head = sum(term(j) for j in range(peak))
    tail, _ = guarded_sum(term, acc, start=peak, name="hitting-time mass")
    return head + tail


def hitting_time_closed_form(k: int, s: float, p: CompositionParams) -> float:
    """Elementary density of the first passage through level 1 or 2."""
    la, lb = p.lambda_alpha, p.lambda_beta
    decay = math.exp(-lb * s * -math.expm1(-la))
    if k == 1:
        return la * math.exp(-la) * lb * decay
    if k == 2:
        return lb * 0.5 * la * la * math.exp(-la) * decay * (1.0 + 2.0 * lb * s * math.exp(-la))
    raise ValueError("closed forms exist for k = 1 and k = 2 only")


def hitting_time_mass_closed_form(k: int, lambda_alpha: float) -> float:
    """``Pr{T_1 < inf} = la e^{-la} / (1 - e^{-la})`` and ``Pr{T_2 < inf} = m1^2 + (la/2) m1``."""
    la = lambda_alpha
    m1 = la * math.exp(-la) / -math.expm1(-la)
    if k == 1:
        return m1
    if k == 2:
        return m1 * m1 + 0.5 * la * m1
    raise ValueError("closed forms exist for k = 1 and k = 2 only")
