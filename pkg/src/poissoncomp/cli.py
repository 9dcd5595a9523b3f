"""Command-line entry point: ``poissoncomp {pmf,sample,verify,field,cfrac}``.

Exit codes: 0 success, 1 failed checks, 2 invalid configuration, 3 numeric error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import laws, samplers
from .errors import PoissonCompError, UnknownCheck
from .field import Region, first_contact_cdf, sample_first_contact, sample_subordinated_counts, subordinated_field_pmf
from .rng import DEFAULT_SEED, RngStream
from .verify import (PMF_FIELDS, cauchy_scale_mle, check_names, reports_to_csv, reports_to_json, rows_to_csv,
                     rows_to_json, run_checks, run_identity_check)

SEED_ENV = "POISSONCOMP_SEED"
EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    samples: int = 10 ** 6
    output_format: str = "json"
    output_path: str | None = None


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None
    return _check_seed(seed)


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    return seed


# ---------------------------------------------------------------------------
# laws and samplers reachable from the command line

def _params(a) -> laws.CompositionParams:
    try:
        return laws.CompositionParams(a.la, a.lb, a.nu, a.t)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _need(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _pmf_function(a) -> tuple[Callable[[int], float], int]:
    """Pmf of the requested law and the first point of its support."""
    p = _params(a)
    law = a.law
    if law == "iterated":
        return (lambda k: laws.iterated_poisson_pmf(k, p)), 0
    if law == "frac-poisson":
        return (lambda k: laws.frac_poisson_pmf(k, p.t, p.nu, p.lambda_beta)), 0
    if law == "composed-tau":
        return (lambda r: laws.composed_tau_pmf(r, a.k, p)), 0
    if law == "dml":
        return (lambda r: laws.dml_pmf(r, p.nu, p.linnik_scale)), 0
    if law == "negbin":
        q = p.lambda_alpha / (p.lambda_alpha + p.lambda_beta)
        return (lambda r: laws.negative_binomial_pmf(r, a.k, q)), 0
    if law == "yule-tau":
        return (lambda r: laws.yule_tau_pmf(r, a.k, p)), 1
    if law == "composed-phi":
        return (lambda r: laws.composed_phi_pmf(r, a.k, p)), 0
    if law == "frac-yule":
        return (lambda k: laws.frac_linear_birth_pmf(k, p.t, p.nu, p.lambda_beta)), 1
    if law == "logarithmic":
        _need(0 < a.q < 1, "--q must lie in (0, 1)")
        return (lambda r: laws.logarithmic_pmf(r, a.q)), 1
    raise ConfigError(f"unknown law {law!r}")


PMF_LAWS = ("iterated", "frac-poisson", "composed-tau", "dml", "negbin", "yule-tau", "composed-phi",
            "frac-yule", "logarithmic")


def _sampler(a) -> Callable[[RngStream, int], np.ndarray]:
    p = _params(a)
    law = a.law
    table = {
        "iterated": lambda rng, n: samplers.sample_composition_terminal(p.lambda_alpha, p.lambda_beta, p.t, rng, n),
        "poisson": lambda rng, n: samplers.sample_poisson_count(p.lambda_beta, p.t, rng, n),
        "frac-poisson": lambda rng, n: samplers.sample_frac_poisson_count(p.t, p.nu, p.lambda_beta, rng, n),
        "tau": lambda rng, n: samplers.sample_tau(a.k, p.nu, p.lambda_beta, rng, n),
        "ml-wait": lambda rng, n: samplers.sample_ml_waiting_time(p.nu, p.lambda_beta, rng, n),
        "stable": lambda rng, n: samplers.sample_stable_positive(p.nu, rng, n),
        "dml": lambda rng, n: samplers.sample_dml(p.nu, p.lambda_alpha, p.lambda_beta, rng, n),
        "composed-tau": lambda rng, n: samplers.sample_composed_tau(a.k, p, rng, n),
        "yule-tau": lambda rng, n: samplers.sample_yule_at_tau(a.k, p, rng, n),
        "phi": lambda rng, n: samplers.sample_phi(a.k, p.nu, p.lambda_beta, rng, size=n),
        "frac-yule": lambda rng, n: samplers.sample_frac_yule_count(p.t, p.nu, p.lambda_beta, rng, n),
        "logarithmic": lambda rng, n: samplers.sample_logarithmic(a.q, rng, n),
        "cfrac": lambda rng, n: samplers.sample_cfrac(a.k, rng, n),
        "cauchy-sum": lambda rng, n: samplers.sample_cauchy_sum(a.k, rng, n),
        "first-contact": lambda rng, n: sample_first_contact(a.lam, p.lambda_alpha, rng, n),
    }
    if law not in table:
        raise ConfigError(f"unknown law {law!r}")
    if law == "logarithmic":
        _need(0 < a.q < 1, "--q must lie in (0, 1)")
    if law in ("cfrac", "cauchy-sum", "tau", "composed-tau", "yule-tau", "phi"):
        _need(a.k >= 1, "--k must be >= 1")
    return table[law]


SAMPLE_LAWS = ("iterated", "poisson", "frac-poisson", "tau", "ml-wait", "stable", "dml", "composed-tau",
               "yule-tau", "phi", "frac-yule", "logarithmic", "cfrac", "cauchy-sum", "first-contact")


def _parse_region(text: str) -> Region:
    try:
        kind, _, rest = text.partition(":")
        values = [float(v) for v in rest.split(",")]
        if kind in ("rect", "rectangle") and len(values) == 4:
            return Region.rectangle(*values)
        if kind == "disc" and len(values) == 3:
            return Region.disc(*values)
    except ValueError as exc:
        raise ConfigError(f"bad region {text!r}: {exc}") from None
    raise ConfigError(f"bad region {text!r}; use rect:x0,y0,x1,y1 or disc:cx,cy,r")


def _parse_depths(text: str) -> list[int]:
    out = []
    try:
        for part in text.split(","):
            lo, _, hi = part.partition("-")
            out.extend(range(int(lo), int(hi or lo) + 1))
    except ValueError:
        raise ConfigError(f"bad depth list {text!r}") from None
    if not out or min(out) < 1:
        raise ConfigError("depths must be >= 1")
    return out


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = float(value) if any(c in value for c in ".eE") else int(value)
        except ValueError:
            raise ConfigError(f"--param {key}: {value!r} is not a number") from None
    return out


# ---------------------------------------------------------------------------
# commands

def _emit_rows(rows, header, cfg: RunConfig) -> str:
    return rows_to_json(rows) if cfg.output_format == "json" else rows_to_csv(rows, header)


def cmd_pmf(a, cfg: RunConfig) -> tuple[str, int]:
    pmf, offset = _pmf_function(a)
    _need(a.kmax is None or a.kmax >= offset, f"--kmax must be >= {offset}")
    _need(0 < a.tail_tol < 1, "--tail-tol must lie in (0, 1)")
    if a.kmax is None:
        table = laws.PmfTable.from_function(pmf, offset=offset, tail_tol=a.tail_tol, max_len=a.max_len)
        values = list(table.probs)
    else:
        values = [pmf(k) for k in range(offset, a.kmax + 1)]
    tail = max(0.0, 1.0 - math.fsum(values))
    rows = [{"k": offset + i, "p": v, "tail_bound": tail} for i, v in enumerate(values)]
    return _emit_rows(rows, PMF_FIELDS, cfg), EXIT_OK


def cmd_sample(a, cfg: RunConfig) -> tuple[str, int]:
    draw = _sampler(a)
    values = np.asarray(draw(RngStream(cfg.seed), cfg.samples)).reshape(-1)
    rows = [{"index": i, "value": v.item()} for i, v in enumerate(values)]
    return _emit_rows(rows, ("index", "value"), cfg), EXIT_OK


def cmd_verify(a, cfg: RunConfig) -> tuple[str, int]:
    names = a.check or ["all"]
    if "all" in names:
        names = check_names()
    params = _parse_params(a.param)
    if params and len(names) != 1:
        raise ConfigError("--param applies to a single --check")
    _need(a.threads >= 1, "--threads must be >= 1")
    try:
        if params:
            reports = [run_identity_check(names[0], cfg.samples, cfg.seed, params, timing=a.timing)]
        else:
            reports = run_checks(names, cfg.samples, cfg.seed, a.threads, timing=a.timing)
    except UnknownCheck as exc:
        raise ConfigError(f"unknown check {exc.args[0]!r}; available: {', '.join(check_names())}") from None
    text = reports_to_json(reports) if cfg.output_format == "json" else reports_to_csv(reports)
    return text, EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def cmd_field(a, cfg: RunConfig) -> tuple[str, int]:
    """Exact and empirical count law on a region, then the first-contact cdf on a grid."""
    region = _parse_region(a.region)
    _need(a.lam > 0 and a.la > 0, "--lam and --la must be positive")
    rng = RngStream(cfg.seed)
    counts = sample_subordinated_counts(region, a.lam, a.la, rng.spawn(0), cfg.samples)
    kmax = max(int(counts.max()), 0)
    freq = np.bincount(counts, minlength=kmax + 1) / counts.size
    rows = [{"quantity": "count", "x": k, "exact": subordinated_field_pmf(k, region, a.lam, a.la),
             "empirical": float(freq[k])} for k in range(kmax + 1)]
    dist = np.sort(sample_first_contact(a.lam, a.la, rng.spawn(1), cfg.samples))
    grid = np.linspace(0.0, float(np.quantile(dist, 0.999)), a.grid)
    emp = np.searchsorted(dist, grid, side="right") / dist.size
    exact = first_contact_cdf(grid, a.lam, a.la)
    rows += [{"quantity": "first_contact_cdf", "x": float(g), "exact": float(e), "empirical": float(m)}
             for g, e, m in zip(grid, exact, emp)]
    return _emit_rows(rows, ("quantity", "x", "exact", "empirical"), cfg), EXIT_OK


def cmd_cfrac(a, cfg: RunConfig) -> tuple[str, int]:
    """Cauchy scale MLE of depth-n fractions and of the Fibonacci-sum representation."""
    rows = []
    rng = RngStream(cfg.seed)
    for depth in _parse_depths(a.depth):
        mle = cauchy_scale_mle(samplers.sample_cfrac(depth, rng.spawn(depth), cfg.samples))
        exact = laws.cfrac_scale(depth)
        row = {"depth": depth, "scale_mle": mle, "exact_scale": exact, "rel_error": mle / exact - 1.0}
        if a.sum_form:
            alt = cauchy_scale_mle(samplers.sample_cauchy_sum(depth, rng.spawn(1000 + depth), cfg.samples))
            row["sum_scale_mle"] = alt
        rows.append(row)
    header = ("depth", "scale_mle", "exact_scale", "rel_error") + (("sum_scale_mle",) if a.sum_form else ())
    return _emit_rows(rows, header, cfg), EXIT_OK


COMMANDS = {"pmf": cmd_pmf, "sample": cmd_sample, "verify": cmd_verify, "field": cmd_field, "cfrac": cmd_cfrac}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or {DEFAULT_SEED}")
    common.add_argument("--samples", "--n", type=int, default=None, dest="samples")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="output_format")
    common.add_argument("--output", default=None, help="write to this file instead of stdout")

    rates = _Parser(add_help=False)
    rates.add_argument("--la", type=float, default=1.0, help="outer rate lambda_alpha")
    rates.add_argument("--lb", type=float, default=1.0, help="inner rate lambda_beta")
    rates.add_argument("--nu", type=float, default=1.0, help="fractional order in (0, 1]")
    rates.add_argument("--t", type=float, default=1.0, help="time horizon")
    rates.add_argument("--k", type=int, default=1, help="level / depth / number of summands")
    rates.add_argument("--q", type=float, default=0.5, help="logarithmic parameter")

    parser = _Parser(prog="poissoncomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pmf", parents=[common, rates], help="tabulate an exact law")
    p.add_argument("--law", choices=PMF_LAWS, required=True)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--tail-tol", type=float, default=1e-10, dest="tail_tol")
    p.add_argument("--max-len", type=int, default=5000, dest="max_len")

    s = sub.add_parser("sample", parents=[common, rates], help="draw variates")
    s.add_argument("--law", choices=SAMPLE_LAWS, required=True)
    s.add_argument("--lam", type=float, default=1.0, help="field intensity for first-contact")

    v = sub.add_parser("verify", parents=[common], help="run identity checks")
    v.add_argument("--check", action="append", help="check name or 'all'; repeatable")
    v.add_argument("--param", action="append", help="key=value override for a single check")
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms")
    v.add_argument("--list", action="store_true", help="list check names and exit")

    f = sub.add_parser("field", parents=[common], help="Poisson field counts and first contact")
    f.add_argument("--region", default="rect:0,0,1,1")
    f.add_argument("--lam", type=float, default=1.0)
    f.add_argument("--la", type=float, default=1.0)
    f.add_argument("--grid", type=int, default=101)

    c = sub.add_parser("cfrac", parents=[common], help="Cauchy continued-fraction scales")
    c.add_argument("--depth", default="1-10", help="e.g. 3 or 1-10 or 2,5,8")
    c.add_argument("--sum-form", action="store_true", help="also estimate the Fibonacci-sum representation")
    return parser


_DEFAULT_SAMPLES = {"pmf": 0, "sample": 10, "verify": 10 ** 6, "field": 10 ** 5, "cfrac": 10 ** 6}


def parse_config(argv) -> tuple[argparse.Namespace, RunConfig]:
    args = build_parser().parse_args(argv)
    seed = default_seed() if args.seed is None else _check_seed(args.seed)
    samples = _DEFAULT_SAMPLES[args.command] if args.samples is None else args.samples
    if args.command != "pmf" and samples < 1:
        raise ConfigError("--samples must be positive")
    if args.command == "verify" and samples < 10 ** 4:
        raise ConfigError("verify needs --samples >= 10000")
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "seed", "samples", "output_format", "output")}
    return args, RunConfig(args.command, params, seed, samples, args.output_format, args.output)


def run(argv=None) -> int:
    command = "poissoncomp"
    try:
        args, cfg = parse_config(argv)
        command = cfg.command
        if cfg.command == "verify" and args.list:
            text, code = "".join(name + "\n" for name in check_names()), EXIT_OK
        else:
            text, code = COMMANDS[cfg.command](args, cfg)
    except ConfigError as exc:
        print(f"poissoncomp: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PoissonCompError as exc:
        print(f"poissoncomp {command}: numeric error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"poissoncomp {command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
