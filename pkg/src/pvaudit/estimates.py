"""Effect estimates and counting inputs: data model, CSV parsing, validation.

All input files are comma-separated with a mandatory header row. Columns are
matched by name, so column order does not matter and unknown columns are
ignored.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

ESTIMATE_COLUMNS = ("study_id", "cohort_name", "outcome_label", "rr", "cl_low", "cl_high")
COUNT_COLUMNS = ("paper_id", "year", "foods", "outcomes", "causes", "covariates")
CITATION_COLUMNS = ("cohort_name", "papers_total", "papers_cohort_ffq")

# Plain decimal reals only; rejects thousands separators, underscores, inf/nan.
_REAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INT = re.compile(r"^[+-]?\d+$")


class InputError(ValueError):
    """Malformed or invalid input file content.

    ``row`` is the 1-based data row (header excluded), ``column`` the column
    name; either may be None when the problem is file-level.
    """

    def __init__(self, message, row=None, column=None, study_id=None):
        self.row = row
        self.column = column
        self.study_id = study_id
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column '{column}'")
        if study_id is not None:
            where.append(f"study_id '{study_id}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.reason = message


@dataclass(frozen=True)
class EffectEstimate:
    study_id: str
    cohort_name: str
    outcome_label: str
    point_estimate: float
    ci_lower: float
    ci_upper: float
    confidence_level: float = 0.95


@dataclass(frozen=True)
class SearchSpaceInput:
    paper_id: str
    foods: int
    outcomes: int
    causes: int
    covariates: int
    year: int | None = None


@dataclass(frozen=True)
class CitationCount:
    cohort_name: str
    papers_total: int
    papers_cohort_ffq: int


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(estimate: EffectEstimate) -> ValidationReport:
    """Check the log-scale preconditions of one estimate.

    Non-positive values and inverted or zero-width intervals are errors. A
    point estimate outside (or on the edge of) its interval is only a warning,
    because published tables are rounded.
    """
    report = ValidationReport()
    values = {
        "estimate": estimate.point_estimate,
        "lower limit": estimate.ci_lower,
        "upper limit": estimate.ci_upper,
    }
    for name, value in values.items():
        if not math.isfinite(value):
            report.errors.append(f"non-finite {name}")
        elif value <= 0:
            report.errors.append(f"non-positive {name}")
    if not 0 < estimate.confidence_level < 1:
        report.errors.append("confidence level must lie in (0, 1)")
    if report.errors:
        return report

    lo, hi, rr = estimate.ci_lower, estimate.ci_upper, estimate.point_estimate
    if lo > hi:
        report.errors.append("inverted confidence limits")
    elif lo == hi:
        report.errors.append("degenerate interval")
    elif rr < lo or rr > hi:
        report.warnings.append("point estimate outside CI")
    elif rr == lo or rr == hi:
        report.warnings.append("point on CI boundary")
    return report


def _read_rows(source: str, required):
    if not source.strip():
        raise InputError("empty file")
    reader = csv.DictReader(io.StringIO(source))
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    missing = [c for c in required if c not in header]
    if missing:
        raise InputError(f"missing required column(s): {', '.join(missing)}")
    rows = []
    for i, raw in enumerate(reader, start=1):
        if None in raw:
            raise InputError("too many fields", row=i)
        if all((v or "").strip() == "" for v in raw.values()):
            continue
        rows.append((i, {k: (v or "").strip() for k, v in raw.items()}))
    return header, rows


def _real(text, row, column):
    if not _REAL.match(text):
        raise InputError(f"malformed number {text!r}", row=row, column=column)
    return float(text)


def _integer(text, row, column, minimum=0):
    if not _INT.match(text):
        raise InputError(f"malformed integer {text!r}", row=row, column=column)
    value = int(text)
    if value < minimum:
        raise InputError(f"{column} must be ≥ {minimum}", row=row, column=column)
    return value


def parse_estimates(source: str) -> list[EffectEstimate]:
    """Parse an estimates file into EffectEstimates, in file order.

    Raises InputError naming the row and column for malformed numbers and for
    rows that fail validation. Validation warnings are not raised; call
    :func:`validate` to collect them.
    """
    header, rows = _read_rows(source, ESTIMATE_COLUMNS)
    has_level = "confidence_level" in header
    out = []
    for i, row in rows:
        study_id = row["study_id"]
        level = 0.95
        if has_level and row["confidence_level"]:
            level = _real(row["confidence_level"], i, "confidence_level")
        est = EffectEstimate(
            study_id=study_id,
            cohort_name=row["cohort_name"],
            outcome_label=row["outcome_label"],
            point_estimate=_real(row["rr"], i, "rr"),
            ci_lower=_real(row["cl_low"], i, "cl_low"),
            ci_upper=_real(row["cl_high"], i, "cl_high"),
            confidence_level=level,
        )
        report = validate(est)
        if report.errors:
            raise InputError(report.errors[0], row=i, study_id=study_id)
        out.append(est)
    if not out:
        raise InputError("no data rows")
    return out


def serialize_estimates(estimates) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ESTIMATE_COLUMNS + ("confidence_level",))
    for e in estimates:
        writer.writerow([
            e.study_id, e.cohort_name, e.outcome_label,
            repr(e.point_estimate), repr(e.ci_lower), repr(e.ci_upper),
            repr(e.confidence_level),
        ])
    return buf.getvalue()


def parse_search_space_inputs(source: str) -> list[SearchSpaceInput]:
    """Parse a counting file (one row per base paper)."""
    header, rows = _read_rows(
        source, ("paper_id", "foods", "outcomes", "causes", "covariates")
    )
    out = []
    for i, row in rows:
        year = None
        if "year" in header and row["year"]:
            year = _integer(row["year"], i, "year")
        out.append(SearchSpaceInput(
            paper_id=row["paper_id"],
            foods=_integer(row["foods"], i, "foods"),
            outcomes=_integer(row["outcomes"], i, "outcomes", minimum=1),
            causes=_integer(row["causes"], i, "causes", minimum=1),
            covariates=_integer(row["covariates"], i, "covariates"),
            year=year,
        ))
    if not out:
        raise InputError("no data rows")
    return out


def serialize_search_space_inputs(inputs) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COUNT_COLUMNS)
    for s in inputs:
        writer.writerow([
            s.paper_id, "" if s.year is None else s.year,
            s.foods, s.outcomes, s.causes, s.covariates,
        ])
    return buf.getvalue()


def parse_citation_counts(source: str) -> list[CitationCount]:
    _, rows = _read_rows(source, CITATION_COLUMNS)
    out = []
    for i, row in rows:
        total = _integer(row["papers_total"], i, "papers_total")
        ffq = _integer(row["papers_cohort_ffq"], i, "papers_cohort_ffq")
        if ffq > total:
            raise InputError(
                "papers_cohort_ffq exceeds papers_total", row=i, column="papers_cohort_ffq"
            )
        out.append(CitationCount(row["cohort_name"], total, ffq))
    if not out:
        raise InputError("no data rows")
    return out
