"""Random variates and paths for the processes whose laws live in :mod:`poissoncomp.laws`.

Every sampler takes an :class:`~poissoncomp.rng.RngStream` and an optional
``size``; without ``size`` a single Python scalar is returned, otherwise a
numpy array.  Results depend only on the stream and the arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DivisionUnderflow, InvalidBound, TabulationFailure
from .laws.base import CompositionParams, RateFunction
from .laws.fractional import phi_cdf
from .rng import RngStream
from .specfun import fibonacci

Draws = Callable[[RngStream, int], np.ndarray]

# smallest success probability handed to the geometric generator; keeps draws inside int64
_MIN_GEOMETRIC_P = 1e-15


def _finish(values, size):
    if size is None:
        return values.reshape(-1)[0].item()
    return values


def _shape(size):
    if size is None:
        return (1,)
    return (int(size),) if np.ndim(size) == 0 else tuple(int(x) for x in size)


@dataclass(frozen=True)
class JumpPath:
    """Piecewise-constant counting path: ``levels[i]`` holds from ``times[i]`` on."""

    times: np.ndarray
    levels: np.ndarray
    origin_level: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        levels = np.asarray(self.levels, dtype=np.int64)
        if times.shape != levels.shape:
            raise ValueError("times and levels must have the same length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("jump times must be strictly increasing")
        if np.any(np.diff(np.concatenate(([self.origin_level], levels))) < 0):
            raise ValueError("levels of a counting path cannot decrease")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.times)

    @property
    def terminal(self) -> int:
        return int(self.levels[-1]) if len(self.levels) else int(self.origin_level)

    @property
    def jump_sizes(self) -> np.ndarray:
        return np.diff(np.concatenate(([self.origin_level], self.levels)))

    def value_at(self, t: float) -> int:
        i = np.searchsorted(self.times, t, side="right")
        return int(self.levels[i - 1]) if i else int(self.origin_level)


# counting processes

def _renewal_counts(wait: Draws, horizon, rng: RngStream) -> np.ndarray:
    """Number of renewals in ``[0, horizon]`` for each entry of ``horizon``."""
    horizon = np.asarray(horizon, dtype=float)
    counts = np.zeros(horizon.shape, dtype=np.int64)
    clock = np.zeros(horizon.shape)
    flat_h, flat_c, flat_n = horizon.reshape(-1), clock.reshape(-1), counts.reshape(-1)
    active = np.flatnonzero(flat_h > 0)
    while active.size:
        flat_c[active] += wait(rng, active.size)
        inside = flat_c[active] <= flat_h[active]
        active = active[inside]
        flat_n[active] += 1
    return counts


def exponential_waits(rate: float) -> Draws:
    return lambda rng, n: rng.exponential(n) / rate


def sample_poisson_count(lam: float, t: float, rng: RngStream, size=None):
    """Poisson(``lam t``) variates."""
    if lam < 0 or t < 0:
        raise ValueError("lam and t must be nonnegative")
    return _finish(rng.poisson(lam * t, _shape(size)), size)


def sample_poisson_path(lam: float, t: float, rng: RngStream) -> JumpPath:
    """Homogeneous Poisson path on ``[0, t]`` built from exponential gaps."""
    times = []
    clock = rng.exponential() / lam
    while clock <= t:
        times.append(clock)
        clock += rng.exponential() / lam
    return JumpPath(np.array(times), np.arange(1, len(times) + 1))


def sample_poisson_process_count(lam: float, horizon, rng: RngStream) -> np.ndarray:
    """Poisson process counts read at each horizon, by summing exponential gaps (no Poisson generator)."""
    return _renewal_counts(exponential_waits(lam), horizon, rng)


def _thinning_candidates(rf: RateFunction, t: float, rng: RngStream, paths: int):
    n = rng.poisson(rf.sup_bound * t, paths)
    owner = np.repeat(np.arange(paths), n)
    times = rng.uniform(0.0, t, owner.size)
    rates = np.asarray(rf(times), dtype=float)
    if np.any(rates > rf.sup_bound * (1 + 1e-12)) or np.any(rates < 0):
        raise InvalidBound(f"rate function exceeds sup_bound={rf.sup_bound} on [0, {t}]")
    keep = rng.random(owner.size) * rf.sup_bound < rates
    return owner[keep], times[keep]


def sample_nonhom_poisson(rf: RateFunction, t: float, rng: RngStream) -> JumpPath:
    """Non-homogeneous Poisson path on ``[0, t]`` by thinning a rate-``sup_bound`` process."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t > rf.horizon:
        raise InvalidBound(f"t={t} exceeds the horizon {rf.horizon} of the rate bound")
    _, times = _thinning_candidates(rf, t, rng, 1)
    times = np.sort(times)
    return JumpPath(times, np.arange(1, len(times) + 1))


def sample_nonhom_count(rf: RateFunction, t: float, rng: RngStream, size=None):
    """Terminal counts of independent thinned paths."""
    if t > rf.horizon:
        raise InvalidBound(f"t={t} exceeds the horizon {rf.horizon} of the rate bound")
    paths = int(np.prod(_shape(size)))
    owner, _ = _thinning_candidates(rf, t, rng, paths)
    counts = np.bincount(owner, minlength=paths).astype(np.int64).reshape(_shape(size))
    return _finish(counts, size)


# stable and Mittag-Leffler variates

def sample_stable_positive(nu: float, rng: RngStream, size=None):
    """One-sided stable variate with ``E e^{-mu S} = e^{-mu^nu}``, ``0 < nu < 1``.

    Kanter's representation from one uniform angle and one exponential.
    """
    if not 0 < nu < 1:
        raise ValueError("nu must lie in (0, 1)")
    shape = _shape(size)
    u = np.pi * (1.0 - rng.random(shape))
    e = rng.exponential(shape)
    s = (np.sin(nu * u) / np.sin(u) ** (1.0 / nu)) * (np.sin((1.0 - nu) * u) / e) ** ((1.0 - nu) / nu)
    return _finish(s, size)


def sample_ml_waiting_time(nu: float, lam: float, rng: RngStream, size=None):
    """Mittag-Leffler waiting time: ``Pr{T > s} = E_nu(-lam s^nu)``, via ``(E/lam)^{1/nu} S_nu``."""
    if not 0 < nu <= 1 or lam <= 0:
        raise ValueError("need 0 < nu <= 1 and lam > 0")
    shape = _shape(size)
    e = rng.exponential(shape) / lam
    if nu == 1.0:
        return _finish(e, size)
    return _finish(e ** (1.0 / nu) * sample_stable_positive(nu, rng, shape), size)


def ml_waits(nu: float, lam: float) -> Draws:
    return lambda rng, n: sample_ml_waiting_time(nu, lam, rng, n)


def sample_tau(k: int, nu: float, lambda_beta: float, rng: RngStream, size=None):
    """``tau_k``: sum of ``k`` independent Mittag-Leffler waits."""
    if k < 1:
        raise ValueError("k must be >= 1")
    shape = _shape(size)
    waits = sample_ml_waiting_time(nu, lambda_beta, rng, tuple(shape) + (k,))
    return _finish(waits.sum(axis=-1), size)


def sample_frac_poisson_count(t: float, nu: float, lambda_beta: float, rng: RngStream, size=None):
    """Renewals with Mittag-Leffler interarrivals counted up to ``t``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    counts = _renewal_counts(ml_waits(nu, lambda_beta), np.full(_shape(size), float(t)), rng)
    return _finish(counts, size)


def sample_frac_poisson_path(t: float, nu: float, lambda_beta: float, rng: RngStream) -> JumpPath:
    times = []
    clock = sample_ml_waiting_time(nu, lambda_beta, rng)
    while clock <= t:
        times.append(clock)
        clock += sample_ml_waiting_time(nu, lambda_beta, rng)
    return JumpPath(np.array(times), np.arange(1, len(times) + 1))


# random sums and compositions

def poisson_draws(mean: float) -> Draws:
    return lambda rng, n: rng.poisson(mean, n)


def logarithmic_draws(q: float) -> Draws:
    return lambda rng, n: sample_logarithmic(q, rng, n)


def nonhom_count_draws(rf: RateFunction, t: float) -> Draws:
    return lambda rng, n: sample_nonhom_count(rf, t, rng, n)


def sample_random_sum(count: Draws, jump: Draws, rng: RngStream, size=None):
    """``sum_{j <= n} X_j`` with ``n`` from ``count`` and i.i.d. ``X_j`` from ``jump``.

    The count and the jumps use separate child streams.
    """
    shape = _shape(size)
    paths = int(np.prod(shape))
    n = np.asarray(count(rng.spawn(0), paths), dtype=np.int64).reshape(-1)
    draws = np.asarray(jump(rng.spawn(1), int(n.sum())))
    owner = np.repeat(np.arange(paths), n)
    sums = np.bincount(owner, weights=draws, minlength=paths)
    if np.issubdtype(draws.dtype, np.integer):
        sums = np.rint(sums).astype(np.int64)
    return _finish(sums.reshape(shape), size)


def sample_composition_path(outer_rate: float, inner: JumpPath, rng: RngStream) -> JumpPath:
    """Read an independent Poisson path of rate ``outer_rate`` at the levels of ``inner``.

    The result only moves at the inner jump times; jumps of size zero are kept.
    """
    if len(inner) == 0:
        return JumpPath(np.array([]), np.array([], dtype=np.int64), 0)
    top = float(inner.levels.max())
    arrivals = []
    clock = rng.exponential() / outer_rate
    while clock <= top:
        arrivals.append(clock)
        clock += rng.exponential() / outer_rate
    arrivals = np.array(arrivals)
    levels = np.searchsorted(arrivals, inner.levels.astype(float), side="right")
    origin = int(np.searchsorted(arrivals, float(inner.origin_level), side="right"))
    return JumpPath(inner.times, levels, origin)


def sample_iterated_path(lambda_alpha: float, lambda_beta: float, t: float, rng: RngStream) -> JumpPath:
    """One path of ``N_alpha(N_beta(.))`` on ``[0, t]``."""
    inner = sample_poisson_path(lambda_beta, t, rng.spawn(0))
    return sample_composition_path(lambda_alpha, inner, rng.spawn(1))


def sample_composition_terminal(lambda_alpha: float, lambda_beta: float, t: float, rng: RngStream, size=None):
    """``N_alpha(N_beta(t))`` with both processes built from exponential gaps.

    Vectorised equivalent of :func:`sample_iterated_path` followed by ``terminal``.
    """
    shape = _shape(size)
    inner = sample_poisson_process_count(lambda_beta, np.full(shape, float(t)), rng.spawn(0))
    outer = sample_poisson_process_count(lambda_alpha, inner.astype(float), rng.spawn(1))
    return _finish(outer, size)


def sample_dml(nu: float, lambda_alpha: float, lambda_beta: float, rng: RngStream, size=None):
    """Discrete Mittag-Leffler variate: Poisson(``lambda_alpha s``) at ``s = tau_1``."""
    shape = _shape(size)
    s = sample_tau(1, nu, lambda_beta, rng.spawn(0), shape)
    return _finish(rng.spawn(1).poisson(lambda_alpha * s), size)


def sample_composed_tau(k: int, p: CompositionParams, rng: RngStream, size=None):
    """``N_alpha(tau_k)`` by direct subordination."""
    shape = _shape(size)
    s = sample_tau(k, p.nu, p.lambda_beta, rng.spawn(0), shape)
    return _finish(rng.spawn(1).poisson(p.lambda_alpha * s), size)


# birth processes

def sample_yule_count(lam: float, t: float, rng: RngStream, size=None):
    """Linear birth (Yule) population at ``t`` from one ancestor: geometric with success ``e^{-lam t}``."""
    if lam <= 0 or t < 0:
        raise ValueError("need lam > 0 and t >= 0")
    return _finish(rng.generator.geometric(math.exp(-lam * t), _shape(size)).astype(np.int64), size)


def _geometric_at(rate_times, rng):
    p = np.maximum(np.exp(-rate_times), _MIN_GEOMETRIC_P)
    return rng.generator.geometric(p).astype(np.int64)


def sample_yule_at_tau(k: int, p: CompositionParams, rng: RngStream, size=None):
    """``Y_alpha(tau_k)``: Yule population read at the inverse fractional Poisson time.

    Draws beyond ``1/_MIN_GEOMETRIC_P`` are capped there (far outside any table).
    """
    shape = _shape(size)
    s = sample_tau(k, p.nu, p.lambda_beta, rng.spawn(0), shape)
    return _finish(_geometric_at(p.lambda_alpha * s, rng.spawn(1)), size)


def sample_frac_yule_count(t: float, nu: float, lam: float, rng: RngStream, size=None):
    """Fractional linear birth population at ``t``: Yule read at the inverse stable time ``(t/S)^nu``."""
    shape = _shape(size)
    if nu == 1.0:
        clock = np.full(shape, float(t))
    else:
        clock = (t / sample_stable_positive(nu, rng.spawn(0), shape)) ** nu
    return _finish(_geometric_at(lam * clock, rng.spawn(1)), size)


@lru_cache(maxsize=64)
def _phi_table(k: int, nu: float, lambda_beta: float, grid: int):
    """Log-spaced CDF table of ``phi_k`` with the lower and upper cut-offs."""
    # CDF ~ const * (lambda_beta t^nu)^k near zero; start where it is ~1e-10
    t_lo = (1e-10 ** (1.0 / k) / lambda_beta) ** (1.0 / nu)
    harmonic = math.fsum(1.0 / l for l in range(1, k + 1))
    if nu == 1.0:
        t_hi = (math.log(k) + 25.0) / lambda_beta
    else:
        t_hi = (harmonic / (lambda_beta * math.gamma(1.0 - nu) * 1e-7)) ** (1.0 / nu)
    log_t = np.linspace(math.log(t_lo), math.log(t_hi), grid)
    cdf = np.array([phi_cdf(k, math.exp(x), nu, lambda_beta) for x in log_t])
    if np.any(np.diff(cdf) < -1e-12):
        worst = float(np.min(np.diff(cdf)))
        raise TabulationFailure(f"phi CDF table not monotone (step {worst:.3g})")
    cdf = np.maximum.accumulate(cdf)
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    return log_t[keep], cdf[keep], harmonic


def sample_phi(k: int, nu: float, lambda_beta: float, rng: RngStream, grid: int = 2 ** 14, size=None):
    """``phi_k``: first time the fractional linear birth process exceeds ``k``, by numeric inverse CDF.

    ``log t`` is interpolated linearly in the CDF on a ``grid``-point
    log-spaced table; beyond the table the leading tail terms are inverted
    (a power law below, ``H_k / (lambda_beta Gamma(1-nu) t^nu)`` or
    ``k e^{-lambda_beta t}`` above).  The interpolation bias is of order
    ``grid^-2`` in the CDF.
    """
    if grid < 2 ** 10:
        raise ValueError("grid must be at least 2**10")
    log_t, cdf, harmonic = _phi_table(int(k), float(nu), float(lambda_beta), int(grid))
    shape = _shape(size)
    u = rng.random(shape).reshape(-1)
    out = np.exp(np.interp(u, cdf, log_t))
    low = u < cdf[0]
    out[low] = math.exp(log_t[0]) * (u[low] / cdf[0]) ** (1.0 / (nu * k))
    high = u > cdf[-1]
    surv = 1.0 - u[high]
    if nu == 1.0:
        out[high] = -np.log(surv / k) / lambda_beta
    else:
        out[high] = (harmonic / (lambda_beta * math.gamma(1.0 - nu) * surv)) ** (1.0 / nu)
    return _finish(out.reshape(shape), size)


# products, Cauchy fractions, logarithmic law

def normal_draws(rng: RngStream, n: int) -> np.ndarray:
    return rng.generator.standard_normal(n)


def bernoulli_draws(p: float) -> Draws:
    return lambda rng, n: (rng.random(n) < p).astype(float)


def stable_draws(nu: float) -> Draws:
    return lambda rng, n: sample_stable_positive(nu, rng, n)


def _products(counts, jump, rng):
    owner = np.repeat(np.arange(counts.size), counts)
    out = np.ones(counts.size)
    np.multiply.at(out, owner, np.asarray(jump(rng, owner.size), dtype=float))
    return out


def sample_product(t: float, lam: float, jump: Draws, rng: RngStream, size=None):
    """``prod_{j <= N(t)} X_j`` with ``N`` Poisson(``lam t``); the empty product is 1."""
    shape = _shape(size)
    counts = rng.spawn(0).poisson(lam * t, int(np.prod(shape)))
    return _finish(_products(counts, jump, rng.spawn(1)).reshape(shape), size)


def sample_product_pair(s: float, t: float, lam: float, jump: Draws, rng: RngStream, size=None):
    """``(N_pi(s), N_pi(t))`` on the same path, ``s <= t``."""
    if not 0 <= s <= t:
        raise ValueError("need 0 <= s <= t")
    shape = _shape(size)
    n = int(np.prod(shape))
    first = _products(rng.spawn(0).poisson(lam * s, n), jump, rng.spawn(1))
    rest = _products(rng.spawn(2).poisson(lam * (t - s), n), jump, rng.spawn(3))
    a, b = first.reshape(shape), (first * rest).reshape(shape)
    if size is None:
        return float(a[0]), float(b[0])
    return a, b


def sample_cauchy(scale: float, rng: RngStream, size=None):
    return _finish(scale * rng.generator.standard_cauchy(_shape(size)), size)


def cfrac_value(draws: np.ndarray) -> np.ndarray:
    """``[X_1; X_2, ..., X_n] = X_1 + 1/(X_2 + 1/(... + 1/X_n))`` row-wise, evaluated bottom-up."""
    draws = np.atleast_2d(draws)
    value = draws[:, -1].copy()
    for i in range(draws.shape[1] - 2, -1, -1):
        if np.any(value == 0.0):
            raise DivisionUnderflow(f"zero denominator below level {i + 1}")
        value = draws[:, i] + 1.0 / value
    return value


def sample_cfrac(n: int, rng: RngStream, size=None):
    """Depth-``n`` continued fraction of standard Cauchy variables; law C(0, F_{n+1}/F_n).

    Rows hitting an exact zero denominator are redrawn.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    shape = _shape(size)
    m = int(np.prod(shape))
    draws = rng.generator.standard_cauchy((m, n))
    while True:
        try:
            return _finish(cfrac_value(draws).reshape(shape), size)
        except DivisionUnderflow:
            bad = _zero_denominator_rows(draws)
            draws[bad] = rng.generator.standard_cauchy((int(bad.sum()), n))


def _zero_denominator_rows(draws):
    bad = np.zeros(draws.shape[0], dtype=bool)
    value = draws[:, -1].copy()
    for i in range(draws.shape[1] - 2, -1, -1):
        zero = value == 0.0
        bad |= zero
        value = draws[:, i] + 1.0 / np.where(zero, 1.0, value)
    return bad


def sample_cauchy_sum(n: int, rng: RngStream, size=None):
    """``sum_{j <= F_{n+1}} X_j / F_n`` for standard Cauchy ``X_j``; law C(0, F_{n+1}/F_n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    shape = _shape(size)
    total = np.zeros(shape)
    for _ in range(fibonacci(n + 1)):
        total += rng.generator.standard_cauchy(shape)
    return _finish(total / fibonacci(n), size)


def sample_logarithmic(q: float, rng: RngStream, size=None):
    """Logarithmic variate ``Pr{X = r} = -q^r / (r ln(1-q))``, ``r >= 1``."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    return _finish(rng.generator.logseries(q, _shape(size)).astype(np.int64), size)


def sample_random_cfrac(t: float, lam: float, rng: RngStream, size=None):
    """Continued fraction of Poisson(``lam t``) depth; depth 0 is read as a single Cauchy draw."""
    shape = _shape(size)
    m = int(np.prod(shape))
    depth = rng.spawn(0).poisson(lam * t, m)
    out = np.empty(m)
    for d in np.unique(depth):
        rows = np.flatnonzero(depth == d)
        out[rows] = sample_cfrac(max(int(d), 1), rng.spawn(1).spawn(int(d)), rows.size)
    return _finish(out.reshape(shape), size)
