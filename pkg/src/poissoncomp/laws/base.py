"""Parameter containers and the truncated pmf table shared by the laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from ..errors import DegenerateRates


@dataclass(frozen=True)
class CompositionParams:
    """Rates of the outer (alpha) and inner (beta) processes, order nu, horizon t."""

    lambda_alpha: float = 1.0
    lambda_beta: float = 1.0
    nu: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if self.lambda_alpha <= 0 or self.lambda_beta <= 0:
            raise ValueError("rates must be positive")
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")
        if self.t < 0:
            raise ValueError("t must be nonnegative")

    @property
    def linnik_scale(self) -> float:
        """``lambda_beta / lambda_alpha**nu``, the constant driving the tau-composed laws."""
        return self.lambda_beta / self.lambda_alpha ** self.nu

    def swapped(self) -> "CompositionParams":
        return CompositionParams(self.lambda_beta, self.lambda_alpha, self.nu, self.t)


@dataclass(frozen=True)
class RateFunction:
    """Intensity ``lambda(w)`` of a non-homogeneous Poisson process.

    ``evaluator`` must accept numpy arrays.  ``sup_bound`` dominates the
    intensity on ``[0, horizon]`` and drives thinning.
    """

    evaluator: Callable
    cumulative: Callable[[float], float]
    sup_bound: float
    horizon: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        if not self.sup_bound > 0:
            raise ValueError("sup_bound must be positive")

    def __call__(self, w):
        return self.evaluator(w)

    @classmethod
    def constant(cls, rate: float) -> "RateFunction":
        if rate < 0:
            raise ValueError("rate must be nonnegative")
        return cls(lambda w: np.full(np.shape(w), float(rate)) if np.ndim(w) else float(rate),
                   lambda t: rate * t, max(rate, 1e-300), name=f"constant({rate:g})")

    @classmethod
    def linear(cls, slope: float, horizon: float) -> "RateFunction":
        """``lambda(w) = slope * w`` dominated on ``[0, horizon]``."""
        if slope < 0 or horizon <= 0:
            raise ValueError("slope must be nonnegative and horizon positive")
        return cls(lambda w: slope * np.asarray(w, dtype=float) if np.ndim(w) else slope * w,
                   lambda t: 0.5 * slope * t * t, max(slope * horizon, 1e-300), horizon,
                   name=f"linear({slope:g})")

    @classmethod
    def from_callable(cls, fn: Callable, sup_bound: float, horizon: float = math.inf,
                      name: str = "custom") -> "RateFunction":
        """Wrap a vectorised intensity; the cumulative is obtained by quadrature."""
        def cumulative(t):
            if t <= 0:
                return 0.0
            return integrate.quad(lambda w: float(fn(w)), 0.0, t, limit=200)[0]
        return cls(fn, cumulative, sup_bound, horizon, name)


@dataclass(frozen=True)
class BirthRates:
    """Pairwise-distinct positive birth rates ``lambda_1, ..., lambda_K``."""

    rates: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        object.__setattr__(self, "rates", rates)
        if not rates:
            raise ValueError("at least one birth rate is required")
        if any(r <= 0 for r in rates):
            raise ValueError("birth rates must be positive")
        for i, a in enumerate(rates):
            for b in rates[i + 1:]:
                if abs(a - b) <= 1e-12 * max(abs(a), abs(b)):
                    raise DegenerateRates(f"rates {a} and {b} coincide")

    def __len__(self):
        return len(self.rates)

    def __getitem__(self, i):
        return self.rates[i]

    @classmethod
    def linear(cls, rate: float, count: int) -> "BirthRates":
        """``lambda_j = j * rate`` for ``j = 1..count`` (fractional Yule process)."""
        return cls(tuple(rate * j for j in range(1, count + 1)))


@dataclass(frozen=True)
class JumpLaw:
    """Law of the i.i.d. jumps of a random sum, described by its pgf and two moments."""

    pgf: Callable[[float], float]
    mean: float
    second_moment: float
    name: str = "custom"

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean ** 2

    @classmethod
    def poisson(cls, rate: float) -> "JumpLaw":
        return cls(lambda u: math.exp(rate * (u - 1.0)), rate, rate + rate * rate, f"poisson({rate:g})")

    @classmethod
    def logarithmic(cls, q: float) -> "JumpLaw":
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        lq = math.log1p(-q)
        mean = -q / ((1 - q) * lq)
        second = -q / ((1 - q) ** 2 * lq)
        return cls(lambda u: math.log1p(-q * u) / lq, mean, second, f"logarithmic({q:g})")


@dataclass(frozen=True)
class PmfTable:
    """Truncated pmf on ``offset, offset+1, ...`` with the mass left outside the table."""

    offset: int
    probs: np.ndarray
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        # round-off in alternating sums can leave tiny negative values
        probs = np.where((probs < 0) & (probs > -1e-12), 0.0, probs)
        if np.any(probs < 0) or np.any(probs > 1 + 1e-12):
            raise ValueError("pmf entries must lie in [0, 1]")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.probs)

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.probs))

    @property
    def total(self) -> float:
        return float(self.probs.sum()) + self.tail_bound

    def pmf(self, k):
        """Table lookup; zero outside the table."""
        k = np.asarray(k)
        idx = k - self.offset
        inside = (idx >= 0) & (idx < len(self.probs))
        out = np.zeros(k.shape, dtype=float)
        out[inside] = self.probs[idx[inside]]
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def pgf(self, u: float) -> float:
        return float(np.dot(np.power(float(u), self.support.astype(float)), self.probs))

    @classmethod
    def from_function(cls, pmf: Callable[[int], float], offset: int = 0, total_mass: float = 1.0,
                      tail_tol: float = 1e-10, max_len: int = 5000, min_len: int = 1,
                      **meta) -> "PmfTable":
        """Tabulate ``pmf`` from ``offset`` until the uncovered mass drops below ``tail_tol``.

        ``total_mass`` is the mass of the full law (1 for proper laws); the
        reported tail is ``total_mass - sum(probs)``, clipped at zero.
        """
        probs = []
        acc = 0.0
        for i in range(max_len):
            p = float(pmf(offset + i))
            probs.append(p)
            acc += p
            if i + 1 >= min_len and total_mass - acc < tail_tol:
                break
        return cls(offset, np.array(probs), max(0.0, total_mass - acc), meta)
