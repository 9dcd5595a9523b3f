"""Registry of identity checks.

Each check draws both sides of a distributional identity from independent
child streams (or evaluates two analytic forms) and records every comparison
in a :class:`~poissoncomp.verify.report.ComparisonReport`.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, stats

from ..errors import UnknownCheck
from ..field import (Region, first_contact_cdf, sample_first_contact, sample_subordinated_counts,
                     subordinated_field_pmf, subordinated_field_table)
from ..laws import (BirthRates, CompositionParams, PmfTable, RateFunction, bernoulli_mellin, cfrac_charfn,
                    cfrac_charfn_product, cfrac_mixture_cdf, cfrac_scale, cfrac_scale_expansion, composed_birth_pgf,
                    composed_birth_pmf, composed_phi_pgf, composed_phi_pmf, composed_tau_pgf, composed_tau_pmf,
                    composed_tau_table, dml_pmf, dml_table, frac_birth_pmf, frac_linear_birth_pmf,
                    frac_poisson_pmf, frac_poisson_table, hitting_time_closed_form, hitting_time_density,
                    hitting_time_mass_closed_form, hitting_time_total_mass, iterated_pmf_dde_residual,
                    iterated_poisson_moments, iterated_poisson_pgf, iterated_poisson_pmf, iterated_poisson_table,
                    lognormal_mellin, negative_binomial_pmf, negbin_decomposition_params, nonhom_composition_pmf,
                    phi_cdf, product_covariance, product_mean, product_mellin, product_variance,
                    rescaled_tau_laplace, reversed_composition_mean, reversed_composition_pgf, stable_mellin,
                    tau_cdf, tau_density, tau_laplace, yule_tau_moments, yule_tau_pgf, yule_tau_table)
from ..laws.cfrac import _product_factor
from ..rng import DEFAULT_SEED, RngStream
from ..samplers import (bernoulli_draws, logarithmic_draws, nonhom_count_draws, normal_draws, poisson_draws,
                        sample_cauchy, sample_cauchy_sum, sample_cfrac, sample_composed_tau,
                        sample_composition_terminal, sample_dml, sample_frac_poisson_count,
                        sample_frac_yule_count, sample_nonhom_count, sample_phi, sample_product,
                        sample_product_pair, sample_random_cfrac, sample_random_sum, sample_stable_positive,
                        sample_tau, sample_yule_at_tau)
from ..specfun import DEFAULT_ACCURACY, GOLDEN_RATIO, fibonacci_ratio
from .metrics import (SIGMA_LIMIT, Histogram, MomentError, cauchy_scale_mle, chi2_statistic, covariance_error,
                      exact_error, frequency_error, ks_statistic, mean_error, relative_ratio_error, transform_error,
                      tv_distance, tv_tolerance, two_sample_chi2, two_sample_tv, variance_error)
from .report import ComparisonReport

MIN_SAMPLES = 10 ** 4
# heavy-tailed laws are tabulated this far and their tails lumped into one cell
HEAVY_TABLE_LEN = 120


@dataclass(frozen=True)
class Check:
    name: str
    summary: str
    runner: Callable[["CheckContext"], None]
    defaults: dict = field(default_factory=dict)


REGISTRY: dict[str, Check] = {}


def register(name: str, summary: str, **defaults):
    def wrap(fn):
        if name in REGISTRY:
            raise ValueError(f"duplicate check {name!r}")
        REGISTRY[name] = Check(name, summary, fn, defaults)
        return fn
    return wrap


def check_names() -> list[str]:
    return sorted(REGISTRY)


class CheckContext:
    """Streams, parameters and accumulated comparisons of one running check."""

    def __init__(self, n: int, rng: RngStream, params: dict):
        self.n = n
        self.rng = rng
        self.p = params
        self.tvs: list[tuple[str, float, float, float]] = []
        self.errors: list[MomentError] = []
        self.drawn = 0

    def stream(self, i: int) -> RngStream:
        return self.rng.spawn(i)

    def drew(self, count: int):
        self.drawn = max(self.drawn, int(count))

    def tv(self, label: str, samples, table: PmfTable, lump_tail: bool = False) -> float:
        hist = Histogram.for_table(samples, table)
        tv = tv_distance(hist, table, lump_tail)
        stat, dof = chi2_statistic(hist, table)
        self.tvs.append((label, tv, tv_tolerance(table, hist.n), stat / dof if dof else 0.0))
        self.drew(hist.n)
        return tv

    def tv2(self, label: str, a, b, table: PmfTable) -> float:
        tv = two_sample_tv(a, b)
        stat, dof = two_sample_chi2(a, b)
        self.tvs.append((label, tv, tv_tolerance(table, min(len(a), len(b)), two_sample=True),
                         stat / dof if dof else 0.0))
        self.drew(max(len(a), len(b)))
        return tv

    def add(self, *errors: MomentError):
        self.errors.extend(errors)

    def count(self, name: str, mismatches: int):
        """Exact combinatorial comparison: any mismatch fails."""
        self.errors.append(MomentError(name, float(mismatches), 0.0, 0.0 if mismatches == 0 else math.inf))

    def below(self, name: str, value: float, limit: float):
        """Strict upper bound, scaled so that ``value -> limit`` reads as 3 units."""
        units = SIGMA_LIMIT * value / limit if value < limit else math.inf
        self.errors.append(MomentError(name, float(value), float(limit), units))

    def report(self, name: str, seed: int, runtime_ms: int) -> ComparisonReport:
        errors = [MomentError(f"tv {label}", tv, 0.0, SIGMA_LIMIT * tv / tol) for label, tv, tol, _ in self.tvs]
        errors += self.errors
        if self.tvs:
            _, tv, tol, chi2 = max(self.tvs, key=lambda e: e[1] / e[2])
        else:
            tv, tol, chi2 = 0.0, 0.0, 0.0
        return ComparisonReport(name, self.drawn, tv, chi2, tuple(errors), tol,
                                ComparisonReport.verdict(tv, tol, errors), seed, runtime_ms)


def run_identity_check(name: str, n: int = 10 ** 6, seed: int | None = None, params: dict | None = None,
                       timing: bool = False) -> ComparisonReport:
    """Run one registered check with ``n`` draws per sampled side.

    ``params`` overrides the check's defaults; unknown keys raise ``ValueError``.
    """
    try:
        check = REGISTRY[name]
    except KeyError:
        raise UnknownCheck(name) from None
    if n < MIN_SAMPLES:
        raise ValueError(f"n must be at least {MIN_SAMPLES}")
    seed = DEFAULT_SEED if seed is None else int(seed)
    merged = dict(check.defaults)
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"check {name!r} has no parameter {key!r}")
        merged[key] = type(merged[key])(value)
    ctx = CheckContext(int(n), RngStream.for_name(seed, name), merged)
    start = time.perf_counter()
    check.runner(ctx)
    elapsed = int(round(1000 * (time.perf_counter() - start))) if timing else 0
    return ctx.report(name, seed, elapsed)


def run_checks(names, n: int = 10 ** 6, seed: int | None = None, threads: int = 1,
               timing: bool = False) -> list[ComparisonReport]:
    """Run several checks, concurrently when ``threads > 1``; reports come back sorted by name."""
    names = sorted(set(names))
    for name in names:
        if name not in REGISTRY:
            raise UnknownCheck(name)
    if threads <= 1:
        reports = [run_identity_check(name, n, seed, timing=timing) for name in names]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda nm: run_identity_check(nm, n, seed, timing=timing), names))
    return sorted(reports, key=lambda r: r.check_name)


# ---------------------------------------------------------------------------
# cached exact tables

@lru_cache(maxsize=None)
def _iterated_table(la, lb, t):
    return iterated_poisson_table(CompositionParams(la, lb, 1.0, t), tail_tol=1e-9)


@lru_cache(maxsize=None)
def _composed_tau_table(k, la, lb, nu):
    return composed_tau_table(k, CompositionParams(la, lb, nu), tail_tol=1e-9, max_len=HEAVY_TABLE_LEN)


@lru_cache(maxsize=None)
def _dml_table(nu, c):
    return dml_table(nu, c, tail_tol=1e-9, max_len=HEAVY_TABLE_LEN)


@lru_cache(maxsize=None)
def _yule_table(k, la, lb, nu):
    return yule_tau_table(k, CompositionParams(la, lb, nu), tail_tol=1e-9, max_len=HEAVY_TABLE_LEN)


@lru_cache(maxsize=None)
def _frac_yule_table(t, nu, lam):
    return PmfTable.from_function(lambda k: frac_linear_birth_pmf(k, t, nu, lam), offset=1, tail_tol=1e-9,
                                  max_len=HEAVY_TABLE_LEN, law="fractional linear birth")


@lru_cache(maxsize=None)
def _negbin_table(k, q):
    return PmfTable.from_function(lambda r: negative_binomial_pmf(r, k, q), tail_tol=1e-9, law="negative binomial")


def _is_heavy(table: PmfTable) -> bool:
    return table.tail_bound > 1e-9


# ---------------------------------------------------------------------------
# iterated Poisson process

@register("mar", "N_a(N_b(t)) equals in law a Poisson(lb t) sum of Poisson(la) jumps",
          la=1.0, lb=1.0, t=1.0)
def _mar(ctx):
    la, lb, t = ctx.p["la"], ctx.p["lb"], ctx.p["t"]
    table = _iterated_table(la, lb, t)
    a = sample_composition_terminal(la, lb, t, ctx.stream(0), ctx.n)
    b = sample_random_sum(poisson_draws(lb * t), poisson_draws(la), ctx.stream(1), ctx.n)
    ctx.tv2("composition vs random sum", a, b, table)
    ctx.tv("composition vs exact", a, table)
    ctx.tv("random sum vs exact", b, table)


@register("elena", "Bell-polynomial pmf of the iterated Poisson process against the composed sampler",
          la=2.0, lb=1.5, t=1.0)
def _elena(ctx):
    la, lb, t = ctx.p["la"], ctx.p["lb"], ctx.p["t"]
    table = _iterated_table(la, lb, t)
    ctx.add(exact_error("pmf total mass", table.total, 1.0, 1e-12))
    ctx.tv("composition vs exact", sample_composition_terminal(la, lb, t, ctx.stream(0), ctx.n), table)


@register("mah", "pgf exp(lb t (e^{la(u-1)} - 1)) of the iterated Poisson process", la=1.5, lb=1.0, t=1.0)
def _mah(ctx):
    p = CompositionParams(ctx.p["la"], ctx.p["lb"], 1.0, ctx.p["t"])
    table = _iterated_table(p.lambda_alpha, p.lambda_beta, p.t)
    x = sample_composition_terminal(p.lambda_alpha, p.lambda_beta, p.t, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    for u in (0.3, 0.7):
        g = iterated_poisson_pgf(u, p)
        ctx.add(exact_error(f"sum u^r pmf at u={u}", table.pgf(u), g, 1e-9))
        ctx.add(mean_error(f"empirical pgf at u={u}", np.power(u, x), g))


@register("beee-veee", "mean la lb t and variance la (1 + la) lb t of the iterated Poisson process",
          la=1.0, lb=1.0, t=1.0)
def _beee_veee(ctx):
    p = CompositionParams(ctx.p["la"], ctx.p["lb"], 1.0, ctx.p["t"])
    mean, var = iterated_poisson_moments(p)
    x = sample_composition_terminal(p.lambda_alpha, p.lambda_beta, p.t, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    ctx.add(mean_error("mean", x, mean), variance_error("variance", x, var))


@register("elena-dde", "iterated Poisson pmf solves its difference-differential system", kmax=5, h=1e-4)
def _elena_dde(ctx):
    for la, lb, t in ((1.0, 1.0, 1.0), (2.0, 0.5, 1.5), (0.5, 3.0, 0.7)):
        p = CompositionParams(la, lb, 1.0, t)
        worst = max(abs(iterated_pmf_dde_residual(k, p, ctx.p["h"])) for k in range(ctx.p["kmax"] + 1))
        ctx.add(exact_error(f"max residual la={la} lb={lb} t={t}", worst, 0.0, 1e-6))


@register("ielena", "Poisson process read at a non-homogeneous Poisson time equals a random sum",
          la=1.0, slope=2.0, t=1.0)
def _ielena(ctx):
    la, t = ctx.p["la"], ctx.p["t"]
    rf = RateFunction.linear(ctx.p["slope"], t)
    table = PmfTable.from_function(lambda k: nonhom_composition_pmf(k, rf, la, t), tail_tol=1e-9)
    inner = sample_nonhom_count(rf, t, ctx.stream(0), ctx.n)
    a = ctx.stream(1).poisson(la * np.asarray(inner, dtype=float))
    b = sample_random_sum(nonhom_count_draws(rf, t), poisson_draws(la), ctx.stream(2), ctx.n)
    ctx.tv2("composition vs random sum", a, b, table)
    ctx.tv("composition vs exact", a, table)
    ctx.tv("random sum vs exact", b, table)


@register("milton", "mean of a non-homogeneous Poisson process read at a Poisson time",
          la=1.0, slope=1.0, t=1.5)
def _milton(ctx):
    la, t = ctx.p["la"], ctx.p["t"]
    rf = RateFunction.linear(ctx.p["slope"], math.inf)
    outer = ctx.stream(0).poisson(la * t, ctx.n)
    x = ctx.stream(1).poisson(0.5 * ctx.p["slope"] * np.square(outer.astype(float)))
    ctx.drew(ctx.n)
    ctx.add(mean_error("mean", x, reversed_composition_mean(rf, la, t)))
    ctx.add(mean_error("empirical pgf at u=0.5", np.power(0.5, x), reversed_composition_pgf(0.5, rf, la, t)))


def _visits(k, la, rng, n):
    """Whether the partial sums of Poisson(la) steps ever equal ``k``."""
    level = np.zeros(n, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    while active.any():
        idx = np.flatnonzero(active)
        level[idx] += rng.poisson(la, idx.size)
        hit[idx] |= level[idx] == k
        active[idx] = level[idx] < k
    return hit


@register("garla-mass", "first-passage law of the iterated Poisson process is defective", la=1.0, lb=1.0)
def _garla_mass(ctx):
    for la in (0.5, 1.0, 2.0):
        for k in range(1, 6):
            ctx.below(f"Pr(T_{k} < inf) la={la}", hitting_time_total_mass(k, la), 1.0)
    p = CompositionParams(ctx.p["la"], ctx.p["lb"])
    for k in (1, 2):
        closed = hitting_time_mass_closed_form(k, p.lambda_alpha)
        quad = integrate.quad(lambda s: hitting_time_density(k, s, p), 0.0, math.inf,
                              epsabs=0.0, epsrel=1e-12, limit=200)[0]
        ctx.add(relative_ratio_error(f"integral of density k={k}", quad, closed, 1e-8))
        ctx.add(relative_ratio_error(f"series mass k={k}", hitting_time_total_mass(k, p.lambda_alpha), closed, 1e-8))
        for s in (0.5, 2.0):
            ctx.add(relative_ratio_error(f"density k={k} at s={s}", hitting_time_density(k, s, p),
                                         hitting_time_closed_form(k, s, p), 1e-8))
    for k in (1, 2, 3):
        hits = _visits(k, p.lambda_alpha, ctx.stream(k), ctx.n)
        ctx.add(frequency_error(f"visit frequency k={k}", hits, hitting_time_total_mass(k, p.lambda_alpha)))
    ctx.drew(ctx.n)


# ---------------------------------------------------------------------------
# fractional birth processes

@register("sara", "pmf and pgf of a Poisson random sum indexed by a fractional pure birth process",
          la=1.0, t=1.0)
def _sara(ctx):
    rates = BirthRates((1.0, 2.0, 3.0, 4.0))
    la, t = ctx.p["la"], ctx.p["t"]
    for nu in (0.6, 1.0):
        pmf = [composed_birth_pmf(m, t, nu, rates, la) for m in range(80)]
        for u in (0.2, 0.5, 0.9):
            series = math.fsum(u ** m * q for m, q in enumerate(pmf))
            ctx.add(exact_error(f"nu={nu} u={u}", series, composed_birth_pgf(u, t, nu, rates, la), 1e-8))


@register("lawlin-geometric", "fractional linear birth law: geometric at nu = 1, partial fractions agree",
          nu=0.7, lam=1.0, t=1.0)
def _lawlin(ctx):
    nu, lam, t = ctx.p["nu"], ctx.p["lam"], ctx.p["t"]
    rates = BirthRates.linear(lam, 20)
    q = math.exp(-lam * t)
    worst_geo = max(abs(frac_birth_pmf(k, t, 1.0, rates) / (q * (1 - q) ** (k - 1)) - 1) for k in range(1, 21))
    ctx.add(exact_error("nu=1 against geometric, k<=20", worst_geo, 0.0, 1e-10))
    worst = max(abs(frac_birth_pmf(k, t, nu, rates) / frac_linear_birth_pmf(k, t, nu, lam) - 1)
                for k in range(1, 21))
    ctx.add(exact_error(f"nu={nu} general against linear form, k<=20", worst, 0.0, 1e-9))
    table = _frac_yule_table(t, nu, lam)
    ctx.tv("time-changed Yule vs exact", sample_frac_yule_count(t, nu, lam, ctx.stream(0), ctx.n), table,
           lump_tail=_is_heavy(table))


# ---------------------------------------------------------------------------
# planar field

@register("field-rayleigh", "first-contact distance is Rayleigh; emptiness probability of the subordinated field",
          lam=1.0, la=1.0)
def _field_rayleigh(ctx):
    lam, la = ctx.p["lam"], ctx.p["la"]
    m = max(MIN_SAMPLES, ctx.n // 10)
    dist = sample_first_contact(lam, la, ctx.stream(0), m)
    ks = ks_statistic(dist, lambda x: first_contact_cdf(x, lam, la))
    ctx.add(exact_error(f"KS distance at {m} draws", ks, 0.0, 0.005))
    square = Region.rectangle(0.0, 0.0, 1.0, 1.0)
    counts = sample_subordinated_counts(square, lam, la, ctx.stream(1), ctx.n)
    ctx.add(frequency_error("emptiness of the unit square", counts == 0, subordinated_field_pmf(0, square, lam, la)))
    ctx.drew(ctx.n)


@register("field-counts", "subordinated field counts on a disc against the exact law", lam=2.0, la=0.5, radius=1.0)
def _field_counts(ctx):
    disc = Region.disc(0.0, 0.0, ctx.p["radius"])
    table = subordinated_field_table(disc, ctx.p["lam"], ctx.p["la"], tail_tol=1e-9)
    ctx.tv("subordinated counts vs exact",
           sample_subordinated_counts(disc, ctx.p["lam"], ctx.p["la"], ctx.stream(0), ctx.n), table)


# ---------------------------------------------------------------------------
# fractional Poisson process and its inverse times

@register("frac-poisson", "renewal fractional Poisson counts against the Mittag-Leffler pmf",
          nu=0.6, lb=1.0, t=1.0)
def _frac_poisson(ctx):
    nu, lb, t = ctx.p["nu"], ctx.p["lb"], ctx.p["t"]
    table = frac_poisson_table(t, nu, lb, tail_tol=1e-9)
    ctx.tv("renewal counts vs exact", sample_frac_poisson_count(t, nu, lb, ctx.stream(0), ctx.n), table)


@register("car1new", "law of tau_k: density integrates to the cdf, sampler frequencies match", k=3, nu=0.6, lb=1.0)
def _car1new(ctx):
    k, nu, lb = ctx.p["k"], ctx.p["nu"], ctx.p["lb"]
    s = sample_tau(k, nu, lb, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    for x in (0.5, 1.0, 3.0, 10.0):
        cdf = tau_cdf(k, x, nu, lb)
        quad = integrate.quad(lambda y: tau_density(k, y, nu, lb), 0.0, x, epsabs=0.0, epsrel=1e-11, limit=200)[0]
        ctx.add(relative_ratio_error(f"integral of density to {x}", quad, cdf, 1e-8))
        ctx.add(frequency_error(f"Pr(tau <= {x})", s <= x, cdf))


@register("starnew", "alternating binomial sums used to simplify the tau_k density", nmax=20)
def _starnew(ctx):
    top = ctx.p["nmax"]
    bad_alt = sum(sum(math.comb(h, m) * (-1) ** m for m in range(k, h + 1)) != (-1) ** k * math.comb(h - 1, k - 1)
                  for h in range(1, top + 1) for k in range(1, h + 1))
    bad_hockey = sum(sum(math.comb(m - 1, l - 1) for m in range(l, k + 1)) != math.comb(k, l)
                     for k in range(1, top + 1) for l in range(1, k + 1))
    ctx.count("alternating partial sums", bad_alt)
    ctx.count("hockey-stick sums", bad_hockey)


@register("ragno", "Laplace transform (1 + mu^nu / lb)^{-k} of tau_k", k=2, nu=0.7, lb=1.5)
def _ragno(ctx):
    k, nu, lb = ctx.p["k"], ctx.p["nu"], ctx.p["lb"]
    s = sample_tau(k, nu, lb, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    for mu in (0.5, 2.0):
        exact = tau_laplace(k, mu, nu, lb)
        quad = integrate.quad(lambda y: math.exp(-mu * y) * tau_density(k, y, nu, lb), 0.0, math.inf,
                              epsabs=0.0, epsrel=1e-10, limit=400)[0]
        ctx.add(relative_ratio_error(f"integral transform mu={mu}", quad, exact, 1e-7))
        ctx.add(transform_error(f"empirical transform mu={mu}", s, "laplace", mu, exact))


@register("piripi", "rescaled first passage: (1 + lb t mu^nu / k)^{-k} tends to exp(-lb t mu^nu)",
          k=1_000_000, lb=1.0, t=1.0, mu=1.0, nu=0.5)
def _piripi(ctx):
    k, lb, t, mu, nu = ctx.p["k"], ctx.p["lb"], ctx.p["t"], ctx.p["mu"], ctx.p["nu"]
    ctx.add(exact_error(f"k={k}", rescaled_tau_laplace(k, t, mu, nu, lb), math.exp(-lb * t * mu ** nu), 1e-5))


@register("car-pgf-duality", "sum u^r pmf equals the pgf for the tau-composed, iterated and phi-composed laws",
          k=2, tol=1e-6)
def _car_pgf_duality(ctx):
    k, tol = ctx.p["k"], ctx.p["tol"]
    worst = {"tau-composed": 0.0, "iterated": 0.0, "phi-composed": 0.0}
    for la in (2.0, 3.0, 4.0):
        for lb in (0.2, 0.4, 0.6):
            for nu in (0.5, 0.75, 1.0):
                p = CompositionParams(la, lb, nu, 1.0)
                for u in (0.0, 0.3, 0.7):
                    # truncation leaves at most u^(R+1) / (1 - u) << tol
                    top = 0 if u == 0 else int(math.log(1e-3 * tol * (1 - u)) / math.log(u)) + 1
                    pairs = (("tau-composed", lambda r: composed_tau_pmf(r, k, p), composed_tau_pgf(u, k, p)),
                             ("iterated", lambda r: iterated_poisson_pmf(r, p), iterated_poisson_pgf(u, p)),
                             ("phi-composed", lambda r: composed_phi_pmf(r, k, p), composed_phi_pgf(u, k, p)))
                    for label, pmf, pgf in pairs:
                        series = math.fsum(u ** r * pmf(r) for r in range(top + 1))
                        worst[label] = max(worst[label], abs(series - pgf))
    for label, err in worst.items():
        ctx.add(exact_error(f"max |sum u^r pmf - pgf| {label}", err, 0.0, tol))


@register("nu-one-reductions", "at nu = 1 the fractional laws reduce to Poisson, Erlang, negative binomial "
          "and geometric laws", la=1.0, lb=2.0, t=1.5, k=3)
def _nu_one(ctx):
    la, lb, t, k = ctx.p["la"], ctx.p["lb"], ctx.p["t"], ctx.p["k"]
    p = CompositionParams(la, lb, 1.0, t)
    q = la / (la + lb)
    c = lb / la

    def worst(pairs):
        return max(abs(a / b - 1.0) for a, b in pairs)

    ctx.add(exact_error("fractional Poisson vs Poisson", worst(
        (frac_poisson_pmf(m, t, 1.0, lb), float(stats.poisson.pmf(m, lb * t))) for m in range(31)), 0.0, 1e-8))
    ctx.add(exact_error("tau density vs Erlang", worst(
        (tau_density(j, s, 1.0, lb), float(stats.gamma.pdf(s, j, scale=1.0 / lb)))
        for j in range(1, 31) for s in (0.3, 1.0, 4.0, 12.0)), 0.0, 1e-8))
    ctx.add(exact_error("composed tau vs negative binomial", worst(
        (composed_tau_pmf(r, k, p), negative_binomial_pmf(r, k, q)) for r in range(31)), 0.0, 1e-8))
    ctx.add(exact_error("discrete Mittag-Leffler vs geometric", worst(
        (dml_pmf(r, 1.0, c), c / (1.0 + c) * (1.0 / (1.0 + c)) ** r) for r in range(31)), 0.0, 1e-8))


@register("dmlnew", "Poisson count at one Mittag-Leffler wait: discrete Mittag-Leffler law", nu=0.7, la=1.0, lb=1.0)
def _dmlnew(ctx):
    nu, la, lb = ctx.p["nu"], ctx.p["la"], ctx.p["lb"]
    table = _dml_table(nu, lb / la ** nu)
    ctx.tv(f"nu={nu} vs exact", sample_dml(nu, la, lb, ctx.stream(0), ctx.n), table, lump_tail=_is_heavy(table))
    geo = _dml_table(1.0, 1.0)
    ctx.tv("nu=1, la=lb vs geometric(1/2)", sample_dml(1.0, 1.0, 1.0, ctx.stream(1), ctx.n), geo)
    ctx.add(exact_error("geometric(1/2) table", geo.pmf(3), 1.0 / 16.0, 1e-12))


@register("dml-sum", "sum of k discrete Mittag-Leffler draws equals N_a(tau_k)", k=2, nu=0.8, la=2.0, lb=0.5)
def _dml_sum(ctx):
    k, nu, la, lb = ctx.p["k"], ctx.p["nu"], ctx.p["la"], ctx.p["lb"]
    table = _composed_tau_table(k, la, lb, nu)
    heavy = _is_heavy(table)
    summed = sum(sample_dml(nu, la, lb, ctx.stream(i), ctx.n) for i in range(k))
    direct = sample_composed_tau(k, CompositionParams(la, lb, nu), ctx.stream(k), ctx.n)
    ctx.tv("sum of dml draws vs exact", summed, table, lump_tail=heavy)
    ctx.tv("direct composition vs exact", direct, table, lump_tail=heavy)


@register("viewnew", "N_a(tau_k) at nu = 1 is negative binomial", k=3, la=1.0, lb=2.0)
def _viewnew(ctx):
    k, la, lb = ctx.p["k"], ctx.p["la"], ctx.p["lb"]
    p = CompositionParams(la, lb, 1.0)
    q = la / (la + lb)
    worst = max(abs(composed_tau_pmf(r, k, p) / negative_binomial_pmf(r, k, q) - 1.0) for r in range(31))
    ctx.add(exact_error("composed law vs negative binomial, r<=30", worst, 0.0, 1e-8))
    ctx.tv("composition vs negative binomial", sample_composed_tau(k, p, ctx.stream(0), ctx.n),
           _negbin_table(k, q))


def _poisson_logarithmic(ctx, stream):
    k, la, lb = ctx.p["k"], ctx.p["la"], ctx.p["lb"]
    mu, q = negbin_decomposition_params(k, la, lb)
    return sample_random_sum(poisson_draws(mu), logarithmic_draws(q), stream, ctx.n), q


@register("dueparole", "Poisson-stopped sum of logarithmic jumps is negative binomial", k=2, la=1.0, lb=1.0)
def _dueparole(ctx):
    x, q = _poisson_logarithmic(ctx, ctx.stream(0))
    ctx.tv("random sum vs negative binomial", x, _negbin_table(ctx.p["k"], q))


@register("media-varianza", "Wald mean k (la + lb) / lb and variance k la (la + lb) / lb^2 of the "
          "Poisson-logarithmic sum", k=2, la=1.0, lb=1.0)
def _media_varianza(ctx):
    k, la, lb = ctx.p["k"], ctx.p["la"], ctx.p["lb"]
    x, _ = _poisson_logarithmic(ctx, ctx.stream(0))
    ctx.drew(ctx.n)
    ctx.add(mean_error("mean", x, k * (la + lb) / lb))
    ctx.add(variance_error("variance", x, k * la * (la + lb) / lb ** 2))


@register("bottnew-maus", "Yule process read at tau_k: exact law, pgf series and nu = 1 moments",
          k=2, la=1.0, lb=1.0, nu=0.75, lb_moments=6.0)
def _bottnew_maus(ctx):
    k, la, lb, nu = ctx.p["k"], ctx.p["la"], ctx.p["lb"], ctx.p["nu"]
    p = CompositionParams(la, lb, nu)
    table = _yule_table(k, la, lb, nu)
    x = sample_yule_at_tau(k, p, ctx.stream(0), ctx.n)
    ctx.tv(f"nu={nu} vs exact", x, table, lump_tail=_is_heavy(table))
    ctx.add(mean_error(f"nu={nu} empirical pgf at u=0.5", np.power(0.5, x), yule_tau_pgf(0.5, k, p)))
    p1 = CompositionParams(la, ctx.p["lb_moments"], 1.0)
    y = sample_yule_at_tau(k, p1, ctx.stream(1), ctx.n)
    mean, var = yule_tau_moments(k, p1)
    ctx.add(mean_error("nu=1 mean", y, mean), variance_error("nu=1 variance", y, var))
    ctx.add(mean_error("nu=1 empirical pgf at u=0.5", np.power(0.5, y), yule_tau_pgf(0.5, k, p1)))


@register("phi-beta-pgf", "N_a(phi_k) has the Beta-form pgf; phi_k follows the inverse linear birth law",
          k=3, nu=0.7, la=1.0, lb=1.0)
def _phi_beta_pgf(ctx):
    k, nu, la, lb = ctx.p["k"], ctx.p["nu"], ctx.p["la"], ctx.p["lb"]
    p = CompositionParams(la, lb, nu)
    phi = sample_phi(k, nu, lb, ctx.stream(0), size=ctx.n)
    x = ctx.stream(1).poisson(la * phi)
    ctx.drew(ctx.n)
    for u in (0.3, 0.7):
        ctx.add(mean_error(f"empirical pgf at u={u}", np.power(u, x), composed_phi_pgf(u, k, p)))
    for s in (0.5, 1.0, 3.0):
        ctx.add(frequency_error(f"Pr(phi <= {s})", phi <= s, phi_cdf(k, s, nu, lb)))


# ---------------------------------------------------------------------------
# multiplicative compound Poisson

@register("treccani", "Mellin transform exp(lam t (E X^{eta-1} - 1)) of a Poisson product", lam=1.0, t=1.0,
          mu=0.0, sigma=0.5)
def _treccani(ctx):
    lam, t, mu, sigma = ctx.p["lam"], ctx.p["t"], ctx.p["mu"], ctx.p["sigma"]
    x = sample_product(t, lam, lambda rng, n: rng.generator.lognormal(mu, sigma, n), ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    for eta in (1.5, 2.5):
        ctx.add(transform_error(f"Mellin eta={eta}", x, "mellin", eta,
                                product_mellin(eta, t, lam, lognormal_mellin(mu, sigma))))


@register("belalm", "Mellin transform of a Poisson product of positive stable factors", lam=1.0, t=1.0, nu=0.7)
def _belalm(ctx):
    lam, t, nu = ctx.p["lam"], ctx.p["t"], ctx.p["nu"]
    x = sample_product(t, lam, lambda rng, n: sample_stable_positive(nu, rng, n), ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    for eta in (0.7, 1.3):
        ctx.add(transform_error(f"Mellin eta={eta}", x, "mellin", eta, product_mellin(eta, t, lam, stable_mellin(nu))))


@register("bernoulli-product", "Poisson product of Bernoulli factors has mean exp(-lam t (1 - p))",
          lam=1.0, t=1.0, p=0.6)
def _bernoulli_product(ctx):
    lam, t, p = ctx.p["lam"], ctx.p["t"], ctx.p["p"]
    x = sample_product(t, lam, bernoulli_draws(p), ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    ctx.add(mean_error("mean", x, product_mean(t, lam, p)))
    ctx.add(transform_error("Mellin eta=2", x, "mellin", 2.0, product_mellin(2.0, t, lam, bernoulli_mellin(p))))


@register("bianca", "covariance of a Poisson product with Gaussian factors", lam=1.0, s=0.5, t=1.0)
def _bianca(ctx):
    lam, s, t = ctx.p["lam"], ctx.p["s"], ctx.p["t"]
    a, b = sample_product_pair(s, t, lam, normal_draws, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    ctx.add(covariance_error("covariance", a, b, product_covariance(s, t, lam, 0.0, 1.0)))
    ctx.add(variance_error("variance at t", b, product_variance(t, lam, 0.0, 1.0)))


# ---------------------------------------------------------------------------
# Cauchy continued fractions

def _scale_error(name, samples, expected, rel=0.01):
    return relative_ratio_error(name, cauchy_scale_mle(samples), expected, rel)


@register("lem", "reciprocal of C(0, b) is C(0, 1/b)", b=2.0)
def _lem(ctx):
    b = ctx.p["b"]
    x = sample_cauchy(b, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    ctx.add(_scale_error("scale of the reciprocal", 1.0 / x, 1.0 / b))


@register("teo98", "depth-n continued fraction of standard Cauchy draws is C(0, F_{n+1}/F_n)", nmax=10)
def _teo98(ctx):
    for depth in range(1, ctx.p["nmax"] + 1):
        ctx.add(_scale_error(f"scale at depth {depth}", sample_cfrac(depth, ctx.stream(depth), ctx.n),
                             fibonacci_ratio(depth)))
    ctx.drew(ctx.n)


@register("golden", "deep fractions approach scale phi", depth=30)
def _golden(ctx):
    depth = ctx.p["depth"]
    ctx.add(exact_error(f"F_{depth + 1}/F_{depth} vs phi", fibonacci_ratio(depth), GOLDEN_RATIO, 1e-10))
    ctx.add(relative_ratio_error("charfn at large t", cfrac_charfn(1.0, 200.0, 1.0), math.exp(-GOLDEN_RATIO), 1e-12))
    ctx.add(_scale_error(f"scale at depth {depth}", sample_cfrac(depth, ctx.stream(0), ctx.n), GOLDEN_RATIO))
    ctx.drew(ctx.n)


@register("baffioni-product-form", "characteristic function of the Poisson-depth fraction in product form",
          lam=1.0, t=2.0)
def _baffioni(ctx):
    lam, t = ctx.p["lam"], ctx.p["t"]
    worst = 0.0
    for n in range(1, 31):
        for beta in (0.5, 1.0, 2.0):
            direct = math.exp(-beta * cfrac_scale(n))
            worst = max(worst, abs(_product_factor(beta, n, DEFAULT_ACCURACY) / direct - 1.0))
    ctx.add(exact_error("product factor vs exp(-|beta| F_{n+1}/F_n), n<=30", worst, 0.0, 1e-12))
    for beta in (0.5, 1.0, 2.0):
        ctx.add(relative_ratio_error(f"mixture charfn beta={beta}", cfrac_charfn_product(beta, t, lam),
                                     cfrac_charfn(beta, t, lam), 1e-12))
    x = sample_random_cfrac(t, lam, ctx.stream(0), ctx.n)
    ctx.drew(ctx.n)
    ctx.add(transform_error("empirical charfn beta=1", x, "charfn", 1.0, cfrac_charfn(1.0, t, lam)))
    # Kolmogorov-Smirnov at the 0.1% level
    ctx.add(exact_error("KS vs mixture cdf", ks_statistic(x, lambda v: cfrac_mixture_cdf(v, t, lam)), 0.0,
                        1.95 / math.sqrt(ctx.n)))


@register("ago", "aggregate scale phi + sqrt5 sum r^{nj} of the Poisson-depth fraction", lam=1.0, t=2.0)
def _ago(ctx):
    lam, t = ctx.p["lam"], ctx.p["t"]
    worst = max(abs(cfrac_scale_expansion(n) / cfrac_scale(n) - 1.0) for n in range(1, 31))
    ctx.add(exact_error("expansion vs F_{n+1}/F_n, n<=30", worst, 0.0, 1e-12))
    depth = ctx.stream(0).poisson(lam * t, ctx.n)
    scales = np.array([cfrac_scale_expansion(int(d)) if d > 0 else 1.0 for d in range(int(depth.max()) + 1)])
    x = scales[depth] * sample_cauchy(1.0, ctx.stream(1), ctx.n)
    ctx.drew(ctx.n)
    for beta in (0.5, 1.0):
        ctx.add(transform_error(f"empirical charfn beta={beta}", x, "charfn", beta, cfrac_charfn(beta, t, lam)))


@register("stilo", "sum of F_{n+1} Cauchy draws scaled by 1/F_n matches the depth-n fraction", depth=8)
def _stilo(ctx):
    depth = ctx.p["depth"]
    a = cauchy_scale_mle(sample_cauchy_sum(depth, ctx.stream(0), ctx.n))
    b = cauchy_scale_mle(sample_cfrac(depth, ctx.stream(1), ctx.n))
    ctx.drew(ctx.n)
    ctx.add(relative_ratio_error("sum scale vs fraction scale", a, b, 0.01))
    ctx.add(relative_ratio_error("sum scale vs F_{n+1}/F_n", a, fibonacci_ratio(depth), 0.01))
    ctx.add(relative_ratio_error("fraction scale vs F_{n+1}/F_n", b, fibonacci_ratio(depth), 0.01))
