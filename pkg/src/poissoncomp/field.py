"""Planar homogeneous Poisson field, its Poisson-subordinated counts and first-contact distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laws.base import PmfTable
from .laws.iterated import poisson_stopped_poisson_pmf
from .rng import RngStream
from .specfun import DEFAULT_ACCURACY, SeriesAccuracy


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle ``(x0, y0, x1, y1)`` or disc ``(cx, cy, radius)``."""

    kind: str
    params: tuple

    def __post_init__(self):
        params = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", params)
        if self.kind == "rectangle":
            x0, y0, x1, y1 = params
            if x1 < x0 or y1 < y0:
                raise ValueError("rectangle corners must be ordered")
        elif self.kind == "disc":
            if len(params) != 3 or params[2] < 0:
                raise ValueError("disc needs (cx, cy, radius) with radius >= 0")
        else:
            raise ValueError(f"unknown region kind {self.kind!r}")

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "Region":
        return cls("rectangle", (x0, y0, x1, y1))

    @classmethod
    def disc(cls, cx: float, cy: float, radius: float) -> "Region":
        return cls("disc", (cx, cy, radius))

    @property
    def measure(self) -> float:
        if self.kind == "rectangle":
            x0, y0, x1, y1 = self.params
            return (x1 - x0) * (y1 - y0)
        return math.pi * self.params[2] ** 2

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        if self.kind == "rectangle":
            x0, y0, x1, y1 = self.params
            return (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
        cx, cy, r = self.params
        return np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) <= r

    def uniform_points(self, n: int, rng: RngStream) -> np.ndarray:
        if self.kind == "rectangle":
            x0, y0, x1, y1 = self.params
            return np.column_stack((rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)))
        cx, cy, r = self.params
        radius = r * np.sqrt(rng.random(n))
        angle = rng.uniform(0.0, 2.0 * np.pi, n)
        return np.column_stack((cx + radius * np.cos(angle), cy + radius * np.sin(angle)))


def sample_field(region: Region, lam: float, rng: RngStream) -> np.ndarray:
    """Points of a rate-``lam`` Poisson field on ``region`` as an ``(n, 2)`` array."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    n = int(rng.poisson(lam * region.measure))
    return region.uniform_points(n, rng)


def sample_field_counts(region: Region, lam: float, rng: RngStream, size: int) -> np.ndarray:
    """Independent field counts on ``region``; only the measure matters."""
    return rng.poisson(lam * region.measure, size)


def sample_subordinated_counts(region: Region, lam: float, lambda_alpha: float, rng: RngStream,
                               size: int) -> np.ndarray:
    """``N_alpha(N(B))``: a Poisson(lambda_alpha) mark summed over the field points in ``region``."""
    counts = sample_field_counts(region, lam, rng.spawn(0), size)
    marks = rng.spawn(1).poisson(lambda_alpha, int(counts.sum()))
    owner = np.repeat(np.arange(size), counts)
    return np.rint(np.bincount(owner, weights=marks, minlength=size)).astype(np.int64)


def subordinated_field_pmf(k: int, region: Region, lam: float, lambda_alpha: float,
                           acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``Pr{N_alpha(N(B)) = k}``; ``k = 0`` is the emptiness probability."""
    return poisson_stopped_poisson_pmf(k, lam * region.measure, lambda_alpha, acc)


def subordinated_field_pgf(u: float, region: Region, lam: float, lambda_alpha: float) -> float:
    return math.exp(lam * region.measure * math.expm1(lambda_alpha * (u - 1.0)))


def subordinated_field_table(region: Region, lam: float, lambda_alpha: float, tail_tol: float = 1e-10,
                             acc: SeriesAccuracy = DEFAULT_ACCURACY) -> PmfTable:
    return PmfTable.from_function(lambda k: subordinated_field_pmf(k, region, lam, lambda_alpha, acc),
                                  tail_tol=tail_tol, law="subordinated field")


def first_contact(l: float, lam: float, lambda_alpha: float):
    """Cdf and density of the distance to the nearest visible field point (Rayleigh law).

    A point is visible when its Poisson(lambda_alpha) mark is nonzero.
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    rate = lam * math.pi * -math.expm1(-lambda_alpha)
    cdf = -math.expm1(-rate * l * l)
    return cdf, 2.0 * rate * l * math.exp(-rate * l * l)


def first_contact_cdf(l, lam: float, lambda_alpha: float):
    """Vectorised cdf of the first-contact distance."""
    rate = lam * math.pi * -math.expm1(-lambda_alpha)
    return -np.expm1(-rate * np.square(l))


def sample_first_contact(lam: float, lambda_alpha: float, rng: RngStream, size: int,
                         miss_prob: float = 1e-12) -> np.ndarray:
    """Distance from the origin to the nearest field point carrying a nonzero mark.

    Each replication simulates the field on a disc large enough that it holds
    no visible point with probability below ``miss_prob``; such replications
    return ``inf``.
    """
    visible_rate = lam * math.pi * -math.expm1(-lambda_alpha)
    radius = math.sqrt(-math.log(miss_prob) / visible_rate)
    disc = Region.disc(0.0, 0.0, radius)
    counts = sample_field_counts(disc, lam, rng.spawn(0), size)
    total = int(counts.sum())
    pts = disc.uniform_points(total, rng.spawn(1))
    marks = rng.spawn(2).poisson(lambda_alpha, total)
    dist = np.where(marks > 0, np.hypot(pts[:, 0], pts[:, 1]), np.inf)
    owner = np.repeat(np.arange(size), counts)
    out = np.full(size, np.inf)
    np.minimum.at(out, owner, dist)
    return out
