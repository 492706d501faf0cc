"""Serialization: converted-records CSV, SVG p-value plots, JSON audit reports, count tables.

Every writer is deterministic: no timestamps, fixed element order, fixed
number formatting. Re-running on the same inputs gives byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from xml.sax.saxutils import escape

from . import __version__
from .estimates import InputError
from .pplot import PlotClassification, PValueSeries, Thresholds
from .searchspace import SUMMARY_LABELS, FiveNumberSummary, present_chance_findings
from .stats import Method, PValueRecord

REPORT_SCHEMA = "pvaudit.audit-report"
REPORT_SCHEMA_VERSION = 1
CONVERTED_COLUMNS = ("study_id", "outcome_label", "z", "p", "method")

SVG_WIDTH, SVG_HEIGHT = 640, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 70.0, 620.0, 50.0, 410.0


def fmt_num(x: float) -> str:
    """6 significant digits; scientific notation below 1e-4."""
    return format(x, ".6g")


def inputs_digest(contents) -> str:
    h = hashlib.sha256()
    for data in contents:
        if isinstance(data, str):
            data = data.encode("utf-8")
        h.update(len(data).to_bytes(8, "big"))
        h.update(data)
    return "sha256:" + h.hexdigest()


# -- converted records -------------------------------------------------------

def write_converted(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERTED_COLUMNS)
    for r in records:
        writer.writerow([r.study_id, r.outcome_label, fmt_num(r.z), fmt_num(r.p), r.method.value])
    return buf.getvalue()


def read_converted(source: str) -> list[PValueRecord]:
    """Parse a converted-records file; ``outcome_label`` and ``z`` are optional."""
    if not source.strip():
        raise InputError("empty file")
    reader = csv.DictReader(io.StringIO(source))
    header = [h.strip() for h in (reader.fieldnames or [])]
    reader.fieldnames = header
    for col in ("study_id", "p"):
        if col not in header:
            raise InputError(f"missing required column(s): {col}")
    out = []
    for i, row in enumerate(reader, start=1):
        row = {k: (v or "").strip() for k, v in row.items() if k is not None}
        try:
            p = float(row["p"])
            z = float(row["z"]) if row.get("z") else math.nan
        except ValueError:
            raise InputError("malformed number", row=i, column="p") from None
        if not 0.0 <= p <= 1.0:
            raise InputError(f"p-value {row['p']} outside [0, 1]", row=i, column="p",
                             study_id=row["study_id"])
        method = Method(row["method"]) if row.get("method") else Method.EXACT
        out.append(PValueRecord(row["study_id"], z, p, method, row.get("outcome_label", "")))
    if not out:
        raise InputError("no data rows")
    return out


# -- SVG ---------------------------------------------------------------------

def _c(v: float) -> str:
    return f"{v:.2f}"


def slugify(label: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", label.lower()).strip("-")
    return slug or "outcome"


def render_svg(series: PValueSeries, alpha: float = 0.05) -> str:
    """Rank (x) versus p-value (y) with the 45-degree reference and an alpha rule."""
    n = len(series)
    xmax = n + 1

    def sx(rank):
        return _LEFT + (_RIGHT - _LEFT) * rank / xmax

    def sy(p):
        return _BOTTOM - (_BOTTOM - _TOP) * p

    title = escape(series.outcome_label or "p-value plot")
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_WIDTH}" '
        f'height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{_c(SVG_WIDTH / 2)}" y="28.00" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title} (N = {n})</text>',
        '<g id="axes" stroke="#000000" stroke-width="1">',
        f'<line x1="{_c(_LEFT)}" y1="{_c(_BOTTOM)}" x2="{_c(_RIGHT)}" y2="{_c(_BOTTOM)}"/>',
        f'<line x1="{_c(_LEFT)}" y1="{_c(_BOTTOM)}" x2="{_c(_LEFT)}" y2="{_c(_TOP)}"/>',
        '</g>',
    ]

    step = max(1, math.ceil(n / 10))
    out.append('<g id="xticks" font-family="sans-serif" font-size="11" text-anchor="middle">')
    for rank in range(0, xmax + 1, step):
        x = _c(sx(rank))
        out.append(f'<line x1="{x}" y1="{_c(_BOTTOM)}" x2="{x}" y2="{_c(_BOTTOM + 5)}" stroke="#000000"/>')
        out.append(f'<text x="{x}" y="{_c(_BOTTOM + 18)}">{rank}</text>')
    out.append('</g>')
    out.append('<g id="yticks" font-family="sans-serif" font-size="11" text-anchor="end">')
    for i in range(6):
        p = i / 5
        y = _c(sy(p))
        out.append(f'<line x1="{_c(_LEFT - 5)}" y1="{y}" x2="{_c(_LEFT)}" y2="{y}" stroke="#000000"/>')
        out.append(f'<text x="{_c(_LEFT - 8)}" y="{_c(sy(p) + 4)}">{p:.1f}</text>')
    out.append('</g>')
    out.append(
        f'<text x="{_c((_LEFT + _RIGHT) / 2)}" y="{_c(_BOTTOM + 40)}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">Rank</text>'
    )
    out.append(
        f'<text x="18.00" y="{_c((_TOP + _BOTTOM) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18.00 {_c((_TOP + _BOTTOM) / 2)})">p-value</text>'
    )
    out.append(
        f'<line id="reference" x1="{_c(sx(0))}" y1="{_c(sy(0))}" x2="{_c(sx(xmax))}" '
        f'y2="{_c(sy(1))}" stroke="#888888" stroke-width="1" stroke-dasharray="6,4"/>'
    )
    out.append(
        f'<line id="alpha" x1="{_c(_LEFT)}" y1="{_c(sy(alpha))}" x2="{_c(_RIGHT)}" '
        f'y2="{_c(sy(alpha))}" stroke="#cc0000" stroke-width="1" stroke-dasharray="3,3"/>'
    )
    out.append('<g id="points" fill="#000000">')
    for e in series.entries:
        out.append(f'<circle cx="{_c(sx(e.rank))}" cy="{_c(sy(e.p))}" r="3.5"/>')
    out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


# -- JSON report ---------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    if isinstance(x, float):
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


def classification_dict(c: PlotClassification) -> dict:
    return {
        "verdict": c.verdict.value,
        "n": c.n,
        "slope": _num(c.slope),
        "intercept": _num(c.intercept),
        "sse_single": _num(c.sse_single),
        "sse_bilinear": _num(c.sse_bilinear),
        "breakpoint": c.breakpoint,
        "improvement_ratio": _num(c.improvement_ratio),
        "split_breakpoint": c.split_breakpoint,
        "split_sse": _num(c.split_sse),
        "split_ratio": _num(c.split_ratio),
        "n_below_05": c.n_below_05,
        "n_below_001": c.n_below_001,
        "ks": {
            "d_statistic": c.ks.d_statistic,
            "n": c.ks.n,
            "critical_value": c.ks.critical_value,
            "rejected_at_05": c.ks.rejected_at_05,
        },
    }


def outcome_entry(series: PValueSeries, classification: PlotClassification, svg_name: str) -> dict:
    return {
        "outcome_label": series.outcome_label,
        "n": len(series),
        "min_p": series.min_p,
        "max_p": series.max_p,
        "svg": svg_name,
        "classification": classification_dict(classification),
        "series": [{"rank": e.rank, "study_id": e.study_id, "p": e.p} for e in series.entries],
    }


def summary_dict(s: FiveNumberSummary) -> dict:
    return dict(zip(SUMMARY_LABELS, (_num(v) for v in s.values())))


def search_space_section(records, summaries, alpha: float) -> dict:
    median_space = summaries["space"].median
    return {
        "rows": [
            {
                "paper_id": r.input.paper_id,
                "year": r.input.year,
                "foods": r.input.foods,
                "outcomes": r.input.outcomes,
                "causes": r.input.causes,
                "covariates": r.input.covariates,
                "tests": r.tests,
                "models": r.models,
                "space": r.space,
            }
            for r in records
        ],
        "summary": {name: summary_dict(s.rounded()) for name, s in summaries.items()},
        "summary_unrounded": {name: summary_dict(s) for name, s in summaries.items()},
        "alpha": alpha,
        "median_space": median_space,
        "expected_chance_findings": alpha * median_space,
        "expected_chance_findings_presented": present_chance_findings(median_space, alpha),
    }


def audit_report(outcomes, digest: str, thresholds: Thresholds, notes,
                 method: Method | None = None, search_space=None) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "inputs_digest": digest,
        "method": None if method is None else method.value,
        "thresholds": {
            "alpha": thresholds.alpha,
            "majority_fraction": thresholds.majority_fraction,
            "slope_tolerance": thresholds.slope_tolerance,
            "intercept_tolerance": thresholds.intercept_tolerance,
            "sse_ratio": thresholds.sse_ratio,
        },
        "outcomes": sorted(outcomes, key=lambda o: o["outcome_label"]),
        "search_space": search_space,
        "notes": list(notes),
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


# -- count table -------------------------------------------------------------

def _int_text(v) -> str:
    return f"{v:,}"


def _table(header, rows) -> list[str]:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = []
    for row in [header, *rows]:
        cells = [str(row[0]).ljust(widths[0])]
        cells += [str(v).rjust(w) for v, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return lines


def count_table(records, summaries, alpha: float, citation_summaries=None) -> str:
    header = ["paper_id", "year", "foods", "outcomes", "causes", "covariates",
              "tests", "models", "space"]
    rows = [
        [r.input.paper_id, "" if r.input.year is None else r.input.year,
         r.input.foods, r.input.outcomes, r.input.causes, r.input.covariates,
         _int_text(r.tests), _int_text(r.models), _int_text(r.space)]
        for r in records
    ]
    lines = ["Analysis search space per paper", ""]
    lines += _table(header, rows)

    columns = ["foods", "outcomes", "causes", "covariates", "tests", "models", "space"]
    rounded = {c: summaries[c].rounded().values() for c in columns}
    srows = [[label] + [_int_text(rounded[c][i]) for c in columns]
             for i, label in enumerate(SUMMARY_LABELS)]
    lines += ["", "Summary statistics (Tukey hinges, half-up rounding)", ""]
    lines += _table(["statistic"] + columns, srows)

    if citation_summaries:
        ccols = list(citation_summaries)
        crounded = {c: citation_summaries[c].rounded().values() for c in ccols}
        crows = [[label] + [_int_text(crounded[c][i]) for c in ccols]
                 for i, label in enumerate(SUMMARY_LABELS)]
        lines += ["", "Citation counts", ""]
        lines += _table(["statistic"] + ccols, crows)

    median_space = summaries["space"].median
    presented = present_chance_findings(median_space, alpha)
    lines += [
        "",
        f"median search space: {_int_text(median_space) if isinstance(median_space, int) else median_space:}",
        f"alpha: {alpha:g}",
        f"expected chance findings: {_int_text(presented)}",
    ]
    return "\n".join(lines) + "\n"
