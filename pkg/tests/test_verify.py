import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from poissoncomp.errors import UnknownCheck
from poissoncomp.laws import PmfTable
from poissoncomp.rng import RngStream
from poissoncomp.verify import (REPORT_FIELDS, ComparisonReport, MomentError, check_names, parse_json_reports,
                                reports_to_csv, reports_to_json, rows_to_csv, rows_to_json, run_checks,
                                run_identity_check)
from poissoncomp.verify import metrics
from poissoncomp.verify.report import format_number

REQUIRED = {"mar", "elena", "mah", "beee-veee", "elena-dde", "garla-mass", "sara", "car-pgf-duality",
            "nu-one-reductions", "dueparole", "media-varianza", "piripi", "bernoulli-product", "bianca",
            "field-rayleigh", "teo98", "baffioni-product-form", "stilo"}


def geometric_table(q=0.5, tail_tol=1e-12):
    return PmfTable.from_function(lambda k: (1 - q) * q ** k, tail_tol=tail_tol)


# metrics

def test_histogram():
    h = metrics.Histogram.from_samples([0, 1, 1, 3, 7], 0, 3)
    assert h.counts.tolist() == [1, 2, 0, 1] and h.outside == 1 and h.n == 5
    with pytest.raises(ValueError):
        metrics.Histogram.from_samples([0.5, 1.0])


def test_tv_distance_exact_cases():
    table = PmfTable(0, np.array([0.5, 0.5]))
    assert metrics.tv_distance(metrics.Histogram.from_samples([0, 1] * 50), table) == 0.0
    assert metrics.tv_distance(metrics.Histogram.from_samples([0] * 10), table) == pytest.approx(0.5)
    # mass off the table is charged in full
    assert metrics.tv_distance(metrics.Histogram.from_samples([0, 1, 5, 5]), table) == pytest.approx(0.5)
    heavy = PmfTable(0, np.array([0.5, 0.3]), tail_bound=0.2)
    h = metrics.Histogram.from_samples([0] * 5 + [1] * 3 + [9] * 2)
    assert metrics.tv_distance(h, heavy, lump_tail=True) == pytest.approx(0.0)
    assert metrics.tv_distance(h, heavy) == pytest.approx(0.2)


def test_two_sample_tv():
    assert metrics.two_sample_tv([1, 2, 3], [3, 2, 1]) == 0.0
    assert metrics.two_sample_tv([0, 0], [1, 1]) == 1.0


def test_tv_tolerance_scaling():
    table = geometric_table()
    t1 = metrics.tv_tolerance(table, 10_000)
    assert metrics.tv_tolerance(table, 40_000) == pytest.approx(t1 / 2)
    assert metrics.tv_tolerance(table, 10_000, two_sample=True) == pytest.approx(t1 * math.sqrt(2))


def test_tv_false_positive_rate_is_small():
    table = geometric_table()
    n = 20_000
    tol = metrics.tv_tolerance(table, n)
    rng = RngStream(5)
    over = sum(metrics.tv_distance(metrics.Histogram.from_samples(rng.spawn(i).generator.geometric(0.5, n) - 1),
                                   table) > tol for i in range(50))
    assert over == 0


def test_chi2_against_scipy():
    table = PmfTable(0, np.array([0.2, 0.3, 0.5]))
    h = metrics.Histogram.from_samples([0] * 25 + [1] * 30 + [2] * 45)
    stat, dof = metrics.chi2_statistic(h, table)
    assert dof == 2
    assert stat == pytest.approx(stats.chisquare([25, 30, 45], [20, 30, 50]).statistic)


def test_pool_groups():
    assert metrics._pool(np.array([10, 1, 1, 10, 5]), 5).tolist() == [0, 1, 4]
    # a light remainder joins the previous group
    assert metrics._pool(np.array([10, 1, 1, 10, 1, 1]), 5).tolist() == [0, 1]


def test_moment_errors():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    err = metrics.mean_error("m", x, 2.5)
    assert err.sigma_units == 0.0 and isinstance(err, MomentError)
    assert metrics.exact_error("e", 1.0 + 1e-6, 1.0, 1e-6).sigma_units == pytest.approx(3.0)
    assert metrics.relative_ratio_error("r", 101.0, 100.0, 0.01).sigma_units == pytest.approx(3.0)
    assert metrics.exact_error("inf", math.inf, 1.0, 1.0).sigma_units == math.inf


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 5.0), st.integers(0, 10_000))
def test_cauchy_mle_is_consistent(scale, seed):
    x = stats.cauchy.rvs(scale=scale, size=4000, random_state=seed)
    b = metrics.cauchy_scale_mle(x)
    # score equation holds at the root
    assert np.sum(b * b / (x * x + b * b)) == pytest.approx(x.size / 2, rel=1e-7)
    assert b == pytest.approx(scale, rel=0.15)


def test_cauchy_mle_matches_scipy_fit():
    x = stats.cauchy.rvs(scale=1.7, size=20_000, random_state=3)
    _, scale = stats.cauchy.fit(x, floc=0.0)
    assert metrics.cauchy_scale_mle(x) == pytest.approx(scale, rel=1e-4)
    with pytest.raises(ValueError):
        metrics.cauchy_scale_mle(x[:10])


def test_empirical_transforms():
    x = np.array([0.0, 1.0, 2.0])
    assert metrics.empirical_transform(x, "laplace", 1.0) == pytest.approx(np.mean(np.exp(-x)))
    assert metrics.empirical_transform(x, "mellin", 3.0) == pytest.approx(np.mean(x ** 2))
    assert metrics.empirical_transform(x, "charfn", 0.0) == 1.0
    with pytest.raises(ValueError):
        metrics.empirical_transform(x, "fourier", 1.0)


# reports

def sample_report(**kw):
    base = dict(check_name="demo", n_samples=10, tv_distance=0.1, chi2=1.0 / 3.0,
                moment_errors=(MomentError("mean", 0.1, 0.2, -1.5),), tolerance=0.2, passed=True, seed=7,
                runtime_ms=0)
    base.update(kw)
    return ComparisonReport(**base)


def test_verdict():
    ok = [MomentError("a", 0, 0, 2.9)]
    assert ComparisonReport.verdict(0.01, 0.02, ok)
    assert not ComparisonReport.verdict(0.03, 0.02, ok)
    assert not ComparisonReport.verdict(0.01, 0.02, [MomentError("a", 0, 0, -3.1)])
    assert not ComparisonReport.verdict(math.nan, 0.02, ok)


def test_json_round_trip_and_field_order():
    r = sample_report()
    line = reports_to_json([r])
    rec = json.loads(line)
    assert tuple(rec) == REPORT_FIELDS
    assert rec["chi2"] == 1.0 / 3.0
    assert rec["moment_errors"][0] == {"name": "mean", "observed": 0.1, "expected": 0.2, "sigma_units": -1.5}
    assert parse_json_reports(line)[0] == rec


def test_csv_matches_json_numbers():
    reports = [sample_report(), sample_report(check_name="other", passed=False, tv_distance=math.inf)]
    rows = reports_to_csv(reports).splitlines()
    assert rows[0].split(",") == list(REPORT_FIELDS)
    first = rows[1].split(",")
    rec = json.loads(reports_to_json(reports).splitlines()[0])
    assert float(first[3]) == rec["chi2"] and first[6] == "true"
    assert "mean|0.10000000000000001|0.20000000000000001|-1.5" in rows[1]
    assert "Infinity" in rows[2]


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_number_format_round_trips(x):
    assert float(format_number(x)) == x


def test_rows():
    rows = [{"k": 0, "p": 0.5, "tail_bound": 0.25}]
    assert json.loads(rows_to_json(rows)) == rows[0]
    assert rows_to_csv(rows, ("k", "p", "tail_bound")) == "k,p,tail_bound\n0,0.5,0.25\n"


# checks

def test_registry_has_required_checks():
    assert REQUIRED <= set(check_names())
    assert check_names() == sorted(check_names())


def test_bad_requests():
    with pytest.raises(UnknownCheck):
        run_identity_check("no-such-check", 10_000)
    with pytest.raises(ValueError):
        run_identity_check("mar", 100)
    with pytest.raises(ValueError):
        run_identity_check("mar", 10_000, params={"bogus": 1})


def test_check_is_reproducible_and_reports_consistently():
    a = run_identity_check("elena", 20_000, 99)
    b = run_identity_check("elena", 20_000, 99)
    assert a == b and a.seed == 99 and a.n_samples == 20_000 and a.runtime_ms == 0
    assert a.passed == ComparisonReport.verdict(a.tv_distance, a.tolerance, a.moment_errors)
    assert run_identity_check("elena", 20_000, 100) != a


def test_param_override():
    report = run_identity_check("piripi", 10_000, params={"k": 10})
    assert not report.passed
    assert run_identity_check("piripi", 10_000).passed


def test_known_failure_is_reported_not_hidden():
    report = run_identity_check("media-varianza", 10_000)
    assert not report.passed
    assert [m.name for m in report.moment_errors if abs(m.sigma_units) > 3] == ["mean"]


def test_run_checks_independent_of_threads():
    names = ["mar", "sara", "field-counts", "teo98"]
    one = run_checks(names, 10_000, 5, threads=1)
    many = run_checks(names, 10_000, 5, threads=3)
    assert reports_to_json(one) == reports_to_json(many)
    assert [r.check_name for r in one] == sorted(names)


def test_timing_is_opt_in():
    assert run_identity_check("starnew", 10_000, timing=True).runtime_ms >= 0
    assert run_identity_check("starnew", 10_000).runtime_ms == 0
