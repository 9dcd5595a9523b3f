"""Monte Carlo and analytic verification of the distributional identities."""

from .checks import REGISTRY, Check, CheckContext, check_names, register, run_checks, run_identity_check
from .metrics import (Histogram, MomentError, cauchy_scale_mle, chi2_statistic, empirical_transform,
                      tv_distance, tv_tolerance, two_sample_chi2, two_sample_tv)
from .report import (PMF_FIELDS, REPORT_FIELDS, ComparisonReport, parse_json_reports, reports_to_csv,
                     reports_to_json, rows_to_csv, rows_to_json)

__all__ = [name for name in dir() if not name.startswith("_")]
