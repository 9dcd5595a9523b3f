"""Special functions behind the composed-process laws.

Mittag-Leffler functions are summed from their power series.  On the
negative axis the series alternates, so the float pass measures how many
digits were cancelled and, when too many were lost, re-sums the same series
in extended precision (mpmath) with the working precision sized from the
largest term.  Far out on the negative axis the algebraic asymptotic
expansion takes over.
"""

from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import mpmath

from .errors import NonConvergence

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

# Largest n with F_n below 2**64.
FIB_EXACT_MAX = 92

# Float pass is trusted while max|term| / |sum| stays below this.
_CANCELLATION_LIMIT = 1e3
# |z|**(1/nu) beyond which the asymptotic expansion is used.
_ASYMPTOTIC_SCALE = 40.0
_MAX_DPS = 4000


_MP_LOCK = threading.RLock()


@contextmanager
def extended_precision(dps: int):
    """mpmath working precision behind a process-wide lock (mpmath keeps precision globally)."""
    with _MP_LOCK, mpmath.workdps(dps):
        yield


@dataclass(frozen=True)
class SeriesAccuracy:
    """Truncation policy for infinite series.

    A series stops once three consecutive, non-increasing terms are each
    below ``rel_tol`` times the running sum.
    """

    rel_tol: float = 1e-12
    max_terms: int = 10**6

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_ACCURACY = SeriesAccuracy()


class MlArgs(NamedTuple):
    """Arguments of a two-parameter Mittag-Leffler evaluation."""

    nu: float
    beta: float
    z: float

    def validate(self) -> "MlArgs":
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        return self


def guarded_sum(term: Callable[[int], float], acc: SeriesAccuracy = DEFAULT_ACCURACY,
                start: int = 0, name: str = "series"):
    """Sum ``term(start) + term(start+1) + ...`` with the guarded stopping rule.

    Returns ``(total, max_abs_term)``.  Summation is compensated (Neumaier).
    """
    total = 0.0
    comp = 0.0
    max_abs = 0.0
    prev = math.inf
    run = 0
    for n in range(acc.max_terms):
        t = term(start + n)
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
        a = abs(t)
        if a > max_abs:
            max_abs = a
        current = abs(total + comp)
        if a <= prev and (a < acc.rel_tol * current or (a == 0.0 and current == 0.0 and n > 2)):
            run += 1
            if run >= 3:
                return total + comp, max_abs
        else:
            run = 0
        prev = a
    raise NonConvergence(f"{name}: no convergence within {acc.max_terms} terms")


def _guarded_sum_mp(term, rel_tol, max_terms, name):
    total = mpmath.mpf(0)
    max_abs = mpmath.mpf(0)
    prev = mpmath.inf
    run = 0
    for n in range(max_terms):
        t = term(n)
        total += t
        a = abs(t)
        if a > max_abs:
            max_abs = a
        if a <= prev and (a < rel_tol * abs(total) or (a == 0 and total == 0 and n > 2)):
            run += 1
            if run >= 3:
                return total, max_abs
        else:
            run = 0
        prev = a
    raise NonConvergence(f"{name}: no convergence within {max_terms} terms (extended precision)")


# --------------------------------------------------------------------------
# Three-parameter (Prabhakar) series machinery shared by every ML variant.

def _log_rgamma(a: float):
    """Return (log|1/Gamma(a)|, sign of 1/Gamma(a)); sign 0 at the poles."""
    if a > 0.0:
        return -math.lgamma(a), 1
    m = round(a)
    if a == m:
        return -math.inf, 0
    # reflection: 1/Gamma(a) = Gamma(1-a) sin(pi a) / pi
    s = math.sin(math.pi * (a - m)) * (-1.0 if m % 2 else 1.0)
    return math.lgamma(1.0 - a) + math.log(abs(s)) - math.log(math.pi), (1 if s > 0 else -1)


class _Coefficients:
    """Lazily extended extended-precision coefficients (delta)_r / (r! Gamma(xi r + gamma))."""

    def __init__(self, xi, gamma, delta, dps):
        self.xi, self.gamma, self.delta, self.dps = xi, gamma, delta, dps
        self.values = []
        self._poch = None

    def __getitem__(self, r):
        while len(self.values) <= r:
            n = len(self.values)
            with extended_precision(self.dps):
                if n == 0:
                    self._poch = mpmath.mpf(1)
                else:
                    self._poch = self._poch * (mpmath.mpf(self.delta) + n - 1) / n
                self.values.append(self._poch * mpmath.rgamma(mpmath.mpf(self.xi) * n + mpmath.mpf(self.gamma)))
        return self.values[r]


@lru_cache(maxsize=512)
def _coefficients(xi, gamma, delta, dps):
    return _Coefficients(xi, gamma, delta, dps)


def _prabhakar_float(xi, gamma, delta, z, acc):
    logz = math.log(abs(z))
    negative = z < 0.0
    log_delta_gamma = math.lgamma(delta)

    def term(r):
        if r == 0:
            return 1.0 / math.gamma(gamma) if gamma < 170 else math.exp(-math.lgamma(gamma))
        lt = math.lgamma(delta + r) - log_delta_gamma - math.lgamma(r + 1.0) \
            - math.lgamma(xi * r + gamma) + r * logz
        v = math.exp(lt)
        return -v if (negative and r % 2) else v

    return guarded_sum(term, acc, name="Mittag-Leffler series")


def _prabhakar_mp(xi, gamma, delta, z, acc, dps):
    coeffs = _coefficients(xi, gamma, delta, dps)
    with extended_precision(dps):
        zz = mpmath.mpf(z)
        powers = [mpmath.mpf(1)]

        def term(r):
            while len(powers) <= r:
                powers.append(powers[-1] * zz)
            return coeffs[r] * powers[r]

        total, max_abs = _guarded_sum_mp(term, mpmath.mpf(acc.rel_tol) * mpmath.mpf("1e-3"),
                                         acc.max_terms, "Mittag-Leffler series")
        return total, max_abs


def _max_log_term(xi, gamma, delta, x):
    """Largest log|term| of the series at |z| = x (terms are unimodal in r)."""
    logx = math.log(x)
    best = -math.inf
    r = 0
    while True:
        lt = (math.lgamma(delta + r) - math.lgamma(delta) - math.lgamma(r + 1.0)
              - math.lgamma(xi * r + gamma) + r * logx)
        if lt > best:
            best = lt
        elif r > 2:
            return best
        r += 1


def _prabhakar_series(xi, gamma, delta, z, acc):
    try:
        total, max_abs = _prabhakar_float(xi, gamma, delta, z, acc)
    except OverflowError:
        if z > 0.0:
            raise
        total, max_abs = 0.0, math.inf
    if z >= 0.0 or max_abs <= _CANCELLATION_LIMIT * abs(total):
        return total
    digits = max(0.0, _max_log_term(xi, gamma, delta, -z) / math.log(10.0))
    # rounded up so nearby arguments share the cached coefficient tables
    dps = 16 * ((24 + int(2.0 * digits)) // 16 + 1)
    for _ in range(4):
        if dps > _MAX_DPS:
            break
        with extended_precision(dps):
            value, big = _prabhakar_mp(xi, gamma, delta, z, acc, dps)
            if value != 0:
                lost = float(mpmath.log10(big / abs(value))) if big > 0 else 0.0
                if lost < dps - 20:
                    return float(value)
                dps = int(lost) + 40
            else:
                dps *= 2
    raise NonConvergence(f"Mittag-Leffler series at z={z}: cancellation exceeds {_MAX_DPS} digits")


def _prabhakar_asymptotic(xi, gamma, delta, x, acc):
    """Algebraic expansion of E^delta_{xi,gamma}(-x) for large x, 0 < xi < 1.

    Terms (-1)^n (delta)_n / n! * x^(-delta-n) / Gamma(gamma - xi(delta+n)),
    truncated where the term envelope (the sine factor of 1/Gamma stripped
    off) reaches its minimum.
    """
    logx = math.log(x)
    total = 0.0
    log_poch = 0.0
    prev_env = math.inf
    run = 0
    for n in range(acc.max_terms):
        if n > 0:
            log_poch += math.log((delta + n - 1) / n)
        a = gamma - xi * (delta + n)
        log_env = log_poch - (delta + n) * logx
        log_env += -math.lgamma(a) if a > 0.0 else math.lgamma(1.0 - a) - math.log(math.pi)
        env = math.exp(log_env)
        if env > prev_env and n > 1:
            break
        prev_env = env
        lr, sign = _log_rgamma(a)
        if sign:
            total += sign * math.exp(log_poch + lr - (delta + n) * logx) * (-1.0 if n % 2 else 1.0)
        if env < acc.rel_tol * abs(total) * 1e-3:
            run += 1
            if run >= 3:
                break
        else:
            run = 0
    return total


def generalized_ml(xi: float, gamma: float, delta: float, z: float,
                   acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Three-parameter Mittag-Leffler function.

    ``sum_r (delta)_r z^r / (Gamma(xi r + gamma) r!)`` with rising factorial
    ``(delta)_r``.  ``xi``, ``gamma`` and ``delta`` must be positive.
    """
    if xi <= 0.0 or gamma <= 0.0 or delta <= 0.0:
        raise ValueError("xi, gamma and delta must be positive")
    return _generalized_ml(float(xi), float(gamma), float(delta), float(z), acc)


@lru_cache(maxsize=65536)
def _generalized_ml(xi, gamma, delta, z, acc):
    if z == 0.0:
        return math.exp(-math.lgamma(gamma))
    if z < 0.0 and xi < 1.0 and (-z) ** (1.0 / xi) >= _ASYMPTOTIC_SCALE:
        return _prabhakar_asymptotic(xi, gamma, delta, -z, acc)
    if z < 0.0 and xi == 1.0 and delta == gamma and -z >= _ASYMPTOTIC_SCALE:
        # (delta)_r / Gamma(r + delta) = 1 / Gamma(delta), so the series is exp(z) / Gamma(delta)
        return math.exp(z - math.lgamma(delta))
    return _prabhakar_series(xi, gamma, delta, z, acc)


def mittag_leffler(nu: float, beta: float, z: float,
                   acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Two-parameter Mittag-Leffler function ``E_{nu,beta}(z)`` for real ``z``.

    Large positive ``z`` raises ``OverflowError`` once the value leaves the float range.

    >>> round(mittag_leffler(1.0, 1.0, 1.0), 9)
    2.718281828
    """
    MlArgs(nu, beta, z).validate()
    return _generalized_ml(float(nu), float(beta), 1.0, float(z), acc)


def ml_survival(nu: float, x: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``E_{nu,1}(-x)``, the survival function of a Mittag-Leffler waiting time."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    return mittag_leffler(nu, 1.0, -x, acc)


def bell_polynomial(k: int, x: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Touchard/Bell polynomial ``e^{-x} sum_r r^k x^r / r!``.

    Equivalently the ``k``-th raw moment of a Poisson(x) variable.
    """
    if k < 0:
        raise ValueError("k must be a natural number")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    logx = math.log(x)

    def term(r):
        if r == 0:
            return math.exp(-x) if k == 0 else 0.0
        return math.exp(k * math.log(r) + r * logx - math.lgamma(r + 1.0) - x)

    # terms rise until r ~ x; the guard only fires on non-increasing small terms
    total, _ = guarded_sum(term, acc, name="Bell polynomial")
    return total


def signed_binomial(a: float, j: int):
    """Generalized binomial coefficient ``a (a-1) ... (a-j+1) / j!``.

    Exact (a Python ``int``) when ``a`` is integral.
    """
    if j < 0:
        raise ValueError("j must be a natural number")
    if float(a).is_integer():
        a = int(a)
        if a >= 0:
            return math.comb(a, j)
        return (-1) ** j * math.comb(j - a - 1, j)
    out = 1.0
    for i in range(j):
        out *= (a - i) / (i + 1)
    return out


def fibonacci(n: int) -> int:
    """Fibonacci number with ``F_1 = F_2 = 1``; exact up to ``n = 92``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > FIB_EXACT_MAX:
        raise OverflowError(f"F_{n} exceeds the 64-bit exact range (n <= {FIB_EXACT_MAX})")
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def fibonacci_ratio(n: int) -> float:
    """``F_{n+1} / F_n``; the golden ratio once the exact range is exhausted."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n + 1 > FIB_EXACT_MAX:
        return GOLDEN_RATIO
    return fibonacci(n + 1) / fibonacci(n)
