"""Check reports and their JSON-lines / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable

from .metrics import SIGMA_LIMIT, MomentError

REPORT_FIELDS = ("check_name", "n_samples", "tv_distance", "chi2", "moment_errors", "tolerance",
                 "passed", "seed", "runtime_ms")
PMF_FIELDS = ("k", "p", "tail_bound")


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of one identity check.

    ``tv_distance`` and ``tolerance`` belong to the headline distributional
    comparison (both 0 for checks without one) and ``chi2`` is its Pearson
    statistic per degree of freedom.  Every other scalar comparison is an entry
    of ``moment_errors``.
    """

    check_name: str
    n_samples: int
    tv_distance: float
    chi2: float
    moment_errors: tuple = field(default_factory=tuple)
    tolerance: float = 0.0
    passed: bool = False
    seed: int = 0
    runtime_ms: int = 0

    @staticmethod
    def verdict(tv: float, tolerance: float, moment_errors: Iterable[MomentError]) -> bool:
        if not math.isfinite(tv) or tv > tolerance:
            return False
        return all(math.isfinite(m.sigma_units) and abs(m.sigma_units) <= SIGMA_LIMIT for m in moment_errors)

    def failures(self) -> list[str]:
        out = []
        if not (self.tv_distance <= self.tolerance):
            out.append(f"tv {self.tv_distance:.4g} > {self.tolerance:.4g}")
        for m in self.moment_errors:
            if not (abs(m.sigma_units) <= SIGMA_LIMIT):
                out.append(f"{m.name}: observed {m.observed:.6g}, expected {m.expected:.6g} "
                           f"({m.sigma_units:+.2f} units)")
        return out


def format_number(x) -> str:
    """17 significant digits for floats so values round-trip exactly."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, MomentError):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(getattr(v, k))}" for k in v._fields) + "}"
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return format_number(v)


def _record(obj, names) -> dict:
    return {name: getattr(obj, name) if not isinstance(obj, dict) else obj[name] for name in names}


def to_json_line(record: dict) -> str:
    return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in record.items()) + "}"


def report_record(report: ComparisonReport) -> dict:
    return _record(report, REPORT_FIELDS)


def reports_to_json(reports: Iterable[ComparisonReport]) -> str:
    """One JSON object per line, in the order given."""
    return "".join(to_json_line(report_record(r)) + "\n" for r in reports)


def _moment_cell(errors) -> str:
    return ";".join(f"{m.name}|{format_number(m.observed)}|{format_number(m.expected)}|"
                    f"{format_number(m.sigma_units)}" for m in errors)


def reports_to_csv(reports: Iterable[ComparisonReport]) -> str:
    """Flat CSV; ``moment_errors`` is ``name|observed|expected|sigma_units`` entries joined by ``;``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for r in reports:
        row = []
        for name in REPORT_FIELDS:
            v = getattr(r, name)
            if name == "moment_errors":
                row.append(_moment_cell(v))
            elif isinstance(v, str):
                row.append(v)
            else:
                row.append(format_number(v))
        writer.writerow(row)
    return buf.getvalue()


def rows_to_json(rows: Iterable[dict]) -> str:
    return "".join(to_json_line(row) + "\n" for row in rows)


def rows_to_csv(rows: Iterable[dict], header: Iterable[str]) -> str:
    header = tuple(header)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row[h] if isinstance(row[h], str) else format_number(row[h]) for h in header])
    return buf.getvalue()


def parse_json_reports(text: str) -> list[dict]:
    """Read back JSON-lines output; used by tests and downstream tooling."""
    return [json.loads(line) for line in text.splitlines() if line.strip()]
