"""Command-line entry point: ``pvaudit convert | plot | count | simulate``.

Exit status: 0 success, 1 usage or flag error, 2 data validation error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .estimates import InputError, parse_citation_counts, parse_estimates, parse_search_space_inputs, validate
from .pplot import DEFAULT_THRESHOLDS, build_series, classify
from .report import (
    audit_report,
    count_table,
    dump_json,
    inputs_digest,
    outcome_entry,
    read_converted,
    render_svg,
    search_space_section,
    slugify,
    write_converted,
)
from .searchspace import SearchSpaceOverflow, search_space, summarize_citations, summarize_records
from .simulate import SimulationConfig, calibrate_classifier
from .stats import DegenerateIntervalError, Method, convert_batch

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
REPORT_NAME = "audit_report.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _alpha(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def _is_estimates_file(text: str) -> bool:
    head = text.lstrip().splitlines()[0] if text.strip() else ""
    cols = {c.strip() for c in head.split(",")}
    return {"rr", "cl_low", "cl_high"} <= cols


def _warning_notes(estimates) -> list[str]:
    notes = []
    for e in estimates:
        for w in validate(e).warnings:
            notes.append(f"{e.study_id}: {w} (rr {e.point_estimate:g}, ci {e.ci_lower:g}-{e.ci_upper:g})")
    return notes


def cmd_convert(args) -> int:
    text = _read(args.input)
    estimates = parse_estimates(text)
    for note in _warning_notes(estimates):
        print(f"warning: {note}", file=sys.stderr)
    records = convert_batch(estimates, args.method)
    _write(args.output, write_converted(records))
    return EXIT_OK


def cmd_plot(args) -> int:
    text = _read(args.input)
    contents = [text]
    notes = []
    method = None
    if _is_estimates_file(text):
        estimates = parse_estimates(text)
        notes += _warning_notes(estimates)
        method = Method(args.method)
        records = convert_batch(estimates, method)
    else:
        records = read_converted(text)

    groups: dict[str, list] = {}
    for r in records:
        key = r.outcome_label if args.group_by == "outcome" else ""
        groups.setdefault(key, []).append(r)

    ss_section = None
    if args.counts:
        counts_text = _read(args.counts)
        contents.append(counts_text)
        ss_records = [search_space(s) for s in parse_search_space_inputs(counts_text)]
        ss_section = search_space_section(ss_records, summarize_records(ss_records), args.alpha)

    thresholds = replace(DEFAULT_THRESHOLDS, alpha=args.alpha)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outcomes = []
    used = set()
    for label in sorted(groups):
        series = build_series(groups[label], label or "all")
        name = slugify(series.outcome_label)
        while name in used:
            name += "-x"
        used.add(name)
        svg_name = f"{name}.svg"
        (out_dir / svg_name).write_text(render_svg(series, args.alpha), encoding="utf-8", newline="\n")
        c = classify(series, thresholds)
        outcomes.append(outcome_entry(series, c, svg_name))
        if c.n < 5:
            notes.append(f"{series.outcome_label}: N = {c.n} < 5, bilinear fit unavailable")

    report = audit_report(outcomes, inputs_digest(contents), thresholds, notes,
                          method=method, search_space=ss_section)
    (out_dir / REPORT_NAME).write_text(dump_json(report), encoding="utf-8", newline="\n")
    for o in report["outcomes"]:
        print(f"{o['outcome_label']}: N = {o['n']}, verdict {o['classification']['verdict']}")
    return EXIT_OK


def cmd_count(args) -> int:
    text = _read(args.input)
    records = [search_space(s) for s in parse_search_space_inputs(text)]
    summaries = summarize_records(records)
    contents = [text]
    citation_summaries = None
    if args.citations:
        ctext = _read(args.citations)
        contents.append(ctext)
        citation_summaries = summarize_citations(parse_citation_counts(ctext))
    _write(args.output, count_table(records, summaries, args.alpha, citation_summaries))
    if args.report:
        section = search_space_section(records, summaries, args.alpha)
        report = audit_report([], inputs_digest(contents), replace(DEFAULT_THRESHOLDS, alpha=args.alpha),
                              [], search_space=section)
        _write(args.report, dump_json(report))
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be ≥ 1")
    try:
        config = SimulationConfig(
            n_null=args.n_null, n_alt=args.n_alt, alt_mean_z=args.alt_z,
            trials=args.trials, seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sim = calibrate_classifier(config)
    payload = {"tool_version": __version__, **sim.to_dict()}
    _write(args.output, dump_json(payload))
    if args.output not in (None, "-"):
        freqs = ", ".join(f"{k} {v}" for k, v in payload["verdict_frequencies"].items())
        print(f"{config.trials} trials: {freqs}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pvaudit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pvaudit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="back-calculate p-values from ratio estimates and CIs")
    p.add_argument("--input", required=True, help="estimates CSV")
    p.add_argument("--output", default="-", help="converted CSV (default: stdout)")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.EXACT.value)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("plot", help="p-value plots (SVG) and an audit report per outcome")
    p.add_argument("--input", required=True, help="converted CSV or estimates CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--group-by", choices=["outcome", "none"], default="outcome")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.EXACT.value,
                   help="used only when --input is an estimates file")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--counts", help="optional counting CSV to include in the report")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("count", help="analysis search space per paper and summary statistics")
    p.add_argument("--input", required=True, help="counting CSV")
    p.add_argument("--citations", help="optional cohort citation-count CSV")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--output", default="-", help="text table (default: stdout)")
    p.add_argument("--report", help="also write a JSON report here")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("simulate", help="seeded Monte Carlo check of the plot classifier")
    p.add_argument("--n-null", type=int, default=25)
    p.add_argument("--n-alt", type=int, default=0)
    p.add_argument("--alt-z", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-", help="JSON report (default: stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pvaudit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, DegenerateIntervalError, SearchSpaceOverflow, ValueError) as exc:
        print(f"pvaudit: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
