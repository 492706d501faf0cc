import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = resources.files("pvaudit") / "data"


def data_text(name):
    return (DATA / name).read_text(encoding="utf-8")


def data_path(name):
    return Path(str(DATA / name))


@pytest.fixture(scope="session")
def allcause_text():
    return data_text("allcause_mortality.csv")


@pytest.fixture(scope="session")
def counts_text():
    return data_text("search_space_counts.csv")


@pytest.fixture(scope="session")
def citations_text():
    return data_text("cohort_citations.csv")


@pytest.fixture(scope="session")
def printed_allcause(allcause_text):
    """study_id -> (printed rank, printed p) from the all-cause data file."""
    import csv
    import io

    rows = csv.DictReader(io.StringIO(allcause_text))
    return {r["study_id"]: (int(r["rank_printed"]), float(r["p_printed"])) for r in rows}
