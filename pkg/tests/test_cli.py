import json
import os
import shutil
from pathlib import Path

import pytest

from conftest import data_path
from pvaudit.cli import main

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("PVAUDIT_UPDATE_GOLDEN") == "1"

ESTIMATES = str(data_path("allcause_mortality.csv"))
COUNTS = str(data_path("search_space_counts.csv"))
CITATIONS = str(data_path("cohort_citations.csv"))

HEADER = "study_id,cohort_name,outcome_label,rr,cl_low,cl_high\n"


def golden_cases(out):
    """(argv, produced paths relative to ``out``) for every subcommand."""
    conv = str(out / "converted_exact.csv")
    return [
        (["convert", "--input", ESTIMATES, "--output", conv], ["converted_exact.csv"]),
        (["convert", "--input", ESTIMATES, "--method", "altman-bland",
          "--output", str(out / "converted_ab.csv")], ["converted_ab.csv"]),
        (["plot", "--input", conv, "--out", str(out / "plot"), "--counts", COUNTS],
         ["plot/all-cause-mortality.svg", "plot/audit_report.json"]),
        (["count", "--input", COUNTS, "--citations", CITATIONS, "--output", str(out / "count.txt"),
          "--report", str(out / "count_report.json")], ["count.txt", "count_report.json"]),
        (["simulate", "--n-null", "20", "--n-alt", "5", "--alt-z", "6", "--trials", "40",
          "--seed", "42", "--output", str(out / "simulate.json")], ["simulate.json"]),
    ]


def run_all(out):
    produced = []
    for argv, files in golden_cases(out):
        assert main(argv) == 0, argv
        produced += files
    return produced


def test_golden_files(tmp_path):
    produced = run_all(tmp_path)
    if UPDATE:
        for name in produced:
            (GOLDEN / name).parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(tmp_path / name, GOLDEN / name)
    for name in produced:
        assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes(), name


def test_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    files = run_all(a)
    run_all(b)
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_missing_input_is_usage_error(capsys):
    assert main(["convert"]) == 1
    assert main(["plot", "--input", "x.csv"]) == 1
    assert main([]) == 1
    assert main(["convert", "--input", "/nonexistent/file.csv"]) == 1


def test_trials_zero_is_usage_error(capsys):
    assert main(["simulate", "--trials", "0"]) == 1
    assert "trials" in capsys.readouterr().err


def test_bad_alpha_is_usage_error():
    assert main(["count", "--input", COUNTS, "--alpha", "1.5"]) == 1


def test_inverted_ci_is_data_error(tmp_path, capsys):
    f = tmp_path / "bad.csv"
    f.write_text(HEADER + "X1,c,o,1.2,1.5,1.0\n")
    assert main(["convert", "--input", str(f)]) == 2
    assert "X1" in capsys.readouterr().err


def test_empty_count_file_is_data_error(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("paper_id,year,foods,outcomes,causes,covariates\n")
    assert main(["count", "--input", str(f)]) == 2


def test_overflow_is_data_error(tmp_path, capsys):
    f = tmp_path / "big.csv"
    f.write_text("paper_id,year,foods,outcomes,causes,covariates\nBig,2000,1,1,1,64\n")
    assert main(["count", "--input", str(f)]) == 2
    assert "Big" in capsys.readouterr().err


def test_convert_altman_bland_ovs(capsys):
    assert main(["convert", "--input", ESTIMATES, "--method", "altman-bland"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "study_id,outcome_label,z,p,method"
    ovs = next(r for r in rows if r.startswith("OVS,"))
    assert ovs.split(",")[3] == "1"


def test_plot_from_estimates(tmp_path):
    assert main(["plot", "--input", ESTIMATES, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "audit_report.json").read_text())
    (entry,) = report["outcomes"]
    assert entry["classification"]["verdict"] == "bilinear"
    assert entry["n"] == 24
    assert entry["max_p"] == 1.0
    assert entry["min_p"] < 1e-7
    assert report["method"] == "exact"
    assert any("PREDIMED" in n for n in report["notes"])
    svg = (tmp_path / entry["svg"]).read_text()
    assert svg.count("<circle") == 24
    assert svg.startswith("<svg") or svg.startswith("<?xml")


def test_plot_single_point(tmp_path):
    f = tmp_path / "one.csv"
    f.write_text("study_id,outcome_label,z,p,method\nA,stroke,1.0,0.3,exact\n")
    out = tmp_path / "out"
    assert main(["plot", "--input", str(f), "--out", str(out)]) == 0
    report = json.loads((out / "audit_report.json").read_text())
    (entry,) = report["outcomes"]
    assert entry["classification"]["verdict"] == "indeterminate"
    assert entry["min_p"] == entry["max_p"] == 0.3
    assert any("bilinear fit unavailable" in n for n in report["notes"])


def test_plot_groups_by_outcome(tmp_path):
    f = tmp_path / "two.csv"
    lines = ["study_id,outcome_label,z,p,method"]
    lines += [f"a{i},stroke,0,{(i + 1) / 7:.4f},exact" for i in range(6)]
    lines += [f"b{i},cancer,0,{(i + 1) / 7:.4f},exact" for i in range(6)]
    f.write_text("\n".join(lines) + "\n")
    out = tmp_path / "out"
    assert main(["plot", "--input", str(f), "--out", str(out)]) == 0
    report = json.loads((out / "audit_report.json").read_text())
    assert [o["outcome_label"] for o in report["outcomes"]] == ["cancer", "stroke"]
    assert (out / "cancer.svg").exists() and (out / "stroke.svg").exists()
    out2 = tmp_path / "out2"
    assert main(["plot", "--input", str(f), "--out", str(out2), "--group-by", "none"]) == 0
    report = json.loads((out2 / "audit_report.json").read_text())
    assert [o["n"] for o in report["outcomes"]] == [12]


def test_count_output(capsys):
    assert main(["count", "--input", COUNTS]) == 0
    out = capsys.readouterr().out
    assert "expected chance findings: 1,037" in out
    assert "20,054,016" in out
