"""Empirical-vs-exact distances, moment errors and estimators used by the checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize, stats

from ..errors import NonConvergence
from ..laws.base import PmfTable

# TV and moment tolerances, see README
TV_FACTOR = 5.0
SIGMA_LIMIT = 3.0


@dataclass(frozen=True)
class Histogram:
    """Counts of the integers ``offset .. offset + len(counts) - 1`` out of ``n`` samples.

    Samples outside that window are only counted, in ``n - counts.sum()``.
    """

    offset: int
    counts: np.ndarray
    n: int

    @property
    def outside(self) -> int:
        return int(self.n - self.counts.sum())

    @classmethod
    def from_samples(cls, samples, lo: int | None = None, hi: int | None = None) -> "Histogram":
        x = np.asarray(samples)
        if x.size == 0:
            raise ValueError("no samples")
        if not np.issubdtype(x.dtype, np.integer):
            if not np.all(np.isfinite(x)) or np.any(x != np.round(x)):
                raise ValueError("histogram samples must be integers")
            x = x.astype(np.int64)
        lo = int(x.min()) if lo is None else int(lo)
        hi = int(x.max()) if hi is None else int(hi)
        inside = x[(x >= lo) & (x <= hi)]
        counts = np.bincount(inside - lo, minlength=hi - lo + 1) if hi >= lo else np.zeros(0, np.int64)
        return cls(lo, counts, int(x.size))

    @classmethod
    def for_table(cls, samples, table: PmfTable) -> "Histogram":
        return cls.from_samples(samples, table.offset, table.offset + len(table) - 1)

    def probabilities(self) -> np.ndarray:
        return self.counts / self.n


def _aligned(hist: Histogram, table: PmfTable):
    """Empirical frequencies on the table's support and the empirical mass off it."""
    p_hat = np.zeros(len(table))
    lo = max(hist.offset, table.offset)
    hi = min(hist.offset + len(hist.counts), table.offset + len(table))
    if hi > lo:
        p_hat[lo - table.offset:hi - table.offset] = hist.counts[lo - hist.offset:hi - hist.offset] / hist.n
    return p_hat, max(0.0, 1.0 - p_hat.sum())


def tv_distance(hist: Histogram, table: PmfTable, lump_tail: bool = False) -> float:
    """Total variation between a histogram and an exact table.

    By default the empirical mass beyond the table and the table's tail bound
    are both charged in full.  With ``lump_tail`` the region beyond the table
    is treated as one cell, which is the right metric for heavy-tailed laws
    whose table cannot reach a negligible tail.
    """
    p_hat, emp_out = _aligned(hist, table)
    inner = 0.5 * float(np.abs(p_hat - table.probs).sum())
    if lump_tail:
        return inner + 0.5 * abs(emp_out - table.tail_bound)
    return inner + 0.5 * (emp_out + table.tail_bound)


def _value_counts(x):
    values, counts = np.unique(np.asarray(x), return_counts=True)
    return values, counts


def two_sample_tv(a, b) -> float:
    """Total variation between the empirical laws of two integer samples."""
    va, ca = _value_counts(a)
    vb, cb = _value_counts(b)
    support = np.union1d(va, vb)
    pa = np.zeros(support.size)
    pb = np.zeros(support.size)
    pa[np.searchsorted(support, va)] = ca / ca.sum()
    pb[np.searchsorted(support, vb)] = cb / cb.sum()
    return 0.5 * float(np.abs(pa - pb).sum())


def tv_tolerance(table: PmfTable, n: int, two_sample: bool = False, factor: float = TV_FACTOR) -> float:
    """``factor`` times the multinomial bound ``(1/2) sum sqrt(p (1 - p) / n)`` on the expected TV.

    The tail mass counts as one more cell.  Two independent samples of size
    ``n`` have a bound larger by ``sqrt 2``.
    """
    p = np.append(table.probs, table.tail_bound)
    bound = 0.5 * float(np.sqrt(p * (1.0 - p)).sum()) / math.sqrt(n)
    return factor * bound * (math.sqrt(2.0) if two_sample else 1.0)


def _pool(weights, min_weight):
    """Start indices of consecutive cells grouped so each group weighs at least ``min_weight``.

    A light remainder at the right end joins the last group.
    """
    starts = []
    acc = min_weight
    for i, w in enumerate(weights):
        if acc >= min_weight:
            starts.append(i)
            acc = 0.0
        acc += w
    if len(starts) > 1 and acc < min_weight:
        starts.pop()
    return np.array(starts, dtype=np.int64)


def chi2_statistic(hist: Histogram, table: PmfTable, min_expected: float = 5.0):
    """Pearson statistic and degrees of freedom; mass off the table forms the last cell."""
    p_hat, emp_out = _aligned(hist, table)
    expected = np.append(table.probs, table.tail_bound) * hist.n
    observed = np.append(p_hat, emp_out) * hist.n
    starts = _pool(expected, min_expected)
    if starts.size < 2:
        return 0.0, 0
    e = np.add.reduceat(expected, starts)
    o = np.add.reduceat(observed, starts)
    e = np.maximum(e, 1e-300)
    return float(np.sum((o - e) ** 2 / e)), int(e.size - 1)


def two_sample_chi2(a, b, min_count: float = 10.0):
    """Homogeneity statistic of two integer samples and its degrees of freedom."""
    va, ca = _value_counts(a)
    vb, cb = _value_counts(b)
    support = np.union1d(va, vb)
    oa = np.zeros(support.size)
    ob = np.zeros(support.size)
    oa[np.searchsorted(support, va)] = ca
    ob[np.searchsorted(support, vb)] = cb
    starts = _pool(oa + ob, min_count)
    if starts.size < 2:
        return 0.0, 0
    merged = np.vstack((np.add.reduceat(oa, starts), np.add.reduceat(ob, starts)))
    stat = stats.chi2_contingency(merged, correction=False)[0]
    return float(stat), int(starts.size - 1)


class MomentError(NamedTuple):
    """One scalar comparison; ``sigma_units`` passes when its magnitude is at most 3."""

    name: str
    observed: float
    expected: float
    sigma_units: float


def _sigma(name, observed, expected, se):
    if se > 0:
        units = (observed - expected) / se
    else:
        units = 0.0 if observed == expected else math.inf
    return MomentError(name, float(observed), float(expected), float(units))


def mean_error(name: str, samples, expected: float) -> MomentError:
    x = np.asarray(samples, dtype=float)
    return _sigma(name, x.mean(), expected, x.std(ddof=1) / math.sqrt(x.size))


def variance_error(name: str, samples, expected: float) -> MomentError:
    """Sample variance against ``expected``; the standard error uses the fourth central moment."""
    x = np.asarray(samples, dtype=float)
    d = x - x.mean()
    var = float(d.var(ddof=1))
    m4 = float(np.mean(d ** 4))
    return _sigma(name, var, expected, math.sqrt(max(m4 - var * var, 0.0) / x.size))


def frequency_error(name: str, hits, expected: float) -> MomentError:
    """Event frequency against its exact probability, with the binomial standard error."""
    h = np.asarray(hits, dtype=bool)
    return _sigma(name, h.mean(), expected, math.sqrt(expected * (1.0 - expected) / h.size))


def covariance_error(name: str, a, b, expected: float) -> MomentError:
    """Sample covariance; its standard error is that of the mean of centred products."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    prod = (x - x.mean()) * (y - y.mean())
    return _sigma(name, float(prod.sum() / (x.size - 1)), expected, prod.std(ddof=1) / math.sqrt(x.size))


def exact_error(name: str, observed: float, expected: float, tol: float, relative: bool = False) -> MomentError:
    """Deterministic comparison scaled so that an error of exactly ``tol`` reads as 3 units."""
    dev = observed - expected
    if relative:
        dev = dev / abs(expected) if expected else (0.0 if dev == 0 else math.inf)
    if not math.isfinite(dev):
        return MomentError(name, float(observed), float(expected), math.inf)
    return MomentError(name, float(observed), float(expected), SIGMA_LIMIT * dev / tol)


def relative_ratio_error(name: str, observed: float, expected: float, rel_tol: float) -> MomentError:
    return exact_error(name, observed, expected, rel_tol, relative=True)


def cauchy_scale_mle(samples) -> float:
    """Maximum-likelihood scale of a centred Cauchy sample.

    Solves ``sum b^2 / (x^2 + b^2) = n / 2``; the left side increases in ``b``.
    """
    x2 = np.square(np.asarray(samples, dtype=float))
    n = x2.size
    if n < 100:
        raise ValueError("need at least 100 samples")
    if not np.all(np.isfinite(x2)):
        raise ValueError("samples must be finite")

    def score(b):
        return float(np.sum(b * b / (x2 + b * b))) - 0.5 * n

    positive = x2[x2 > 0]
    if positive.size == 0:
        raise NonConvergence("Cauchy scale: every sample is zero")
    lo = math.sqrt(float(positive.min())) * 1e-3
    hi = math.sqrt(float(x2.max())) * 1e3
    if not (score(lo) < 0 < score(hi)):
        raise NonConvergence("Cauchy scale: bisection bracket does not straddle the root")
    return optimize.bisect(score, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=400)


def empirical_transform(samples, kind: str, arg: float) -> float:
    """Sample mean of ``exp(-arg X)``, ``X^(arg - 1)`` or ``cos(arg X)``.

    ``kind`` is ``"laplace"``, ``"mellin"`` or ``"charfn"``.  The character
    function uses the real part, which is the whole transform for symmetric laws.
    """
    return float(np.mean(transform_values(samples, kind, arg)))


def transform_values(samples, kind: str, arg: float) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if kind == "laplace":
        return np.exp(-arg * x)
    if kind == "mellin":
        if np.any(x < 0):
            raise ValueError("Mellin transform needs nonnegative samples")
        with np.errstate(divide="ignore"):
            return np.power(x, arg - 1.0)
    if kind == "charfn":
        return np.cos(arg * x)
    raise ValueError(f"unknown transform kind {kind!r}")


def transform_error(name: str, samples, kind: str, arg: float, expected: float) -> MomentError:
    return mean_error(name, transform_values(samples, kind, arg), expected)


def ks_statistic(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance of a continuous sample from ``cdf``."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)
