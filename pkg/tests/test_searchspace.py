import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pvaudit.estimates import SearchSpaceInput, parse_citation_counts, parse_search_space_inputs
from pvaudit.searchspace import (
    SearchSpaceOverflow,
    expected_chance_findings,
    present_chance_findings,
    round_half_up,
    search_space,
    summarize,
    summarize_citations,
    summarize_records,
)

# paper -> (tests, models, space)
PER_PAPER = {
    "Dixon": (153, 131_072, 20_054_016),
    "McNaughton": (22, 8, 176),
    "Panagiotakos": (45, 2_048, 92_160),
    "Heroux": (576, 512, 294_912),
    "Akbaraly": (20, 32, 640),
    "Chan": (34, 1_024, 34_816),
    "Chen": (48, 32, 1_536),
    "Maruyama": (180, 2_048, 368_640),
    "George": (60, 8_192, 491_520),
    "Kumagai": (36, 256, 9_216),
    "Pastorino": (10, 64, 640),
    "Lacoppidan": (6, 65_536, 393_216),
    "Lv": (81, 256, 20_736),
    "Chang-Claude": (15, 128, 1_920),
    "Tonstad": (4, 1_024, 4_096),
}

# per column: min, Q1, median, Q3, max, mean (presented)
COLUMN_SUMMARIES = {
    "foods": (12, 40, 51, 129, 280, 93),
    "outcomes": (1, 1, 3, 5, 32, 5),
    "causes": (3, 8, 15, 25, 51, 18),
    "covariates": (3, 7, 9, 11, 17, 9),
    "tests": (4, 18, 36, 71, 576, 86),
    "models": (8, 96, 512, 2_048, 131_072, 14_149),
    "space": (176, 1_728, 20_736, 331_776, 20_054_016, 1_451_216),
}

CITATION_SUMMARIES = {
    "papers_total": (18, 1_365, 2_480, 4_505, 38_000, 7_547),
    "papers_cohort_ffq": (8, 133, 653, 1_300, 1_800, 737),
}


def ssi(o, c, a):
    return SearchSpaceInput("p", 0, o, c, a)


def test_dixon_and_lv():
    d = search_space(ssi(3, 51, 17))
    assert (d.tests, d.models, d.space) == (153, 131_072, 20_054_016)
    lv = search_space(ssi(3, 27, 8))
    assert (lv.tests, lv.models, lv.space) == (81, 256, 20_736)
    one = search_space(ssi(1, 1, 0))
    assert (one.tests, one.models, one.space) == (1, 1, 1)


def test_per_paper_rows(counts_text):
    records = [search_space(s) for s in parse_search_space_inputs(counts_text)]
    assert {r.input.paper_id: (r.tests, r.models, r.space) for r in records} == PER_PAPER


def test_column_summaries(counts_text):
    records = [search_space(s) for s in parse_search_space_inputs(counts_text)]
    summaries = summarize_records(records)
    for column, expected in COLUMN_SUMMARIES.items():
        assert summaries[column].rounded().values() == expected, column
    tests = summaries["tests"]
    assert (tests.lower_quartile, tests.upper_quartile, tests.mean) == (17.5, 70.5, 86)


def test_citation_summaries(citations_text):
    summaries = summarize_citations(parse_citation_counts(citations_text))
    for column, expected in CITATION_SUMMARIES.items():
        assert summaries[column].rounded().values() == expected, column


def test_summarize_single_and_constant():
    assert summarize([7]).values() == (7, 7, 7, 7, 7, 7)
    assert summarize([5, 5, 5]).values() == (5, 5, 5, 5, 5, 5)


def test_summarize_empty():
    with pytest.raises(ValueError):
        summarize([])
    with pytest.raises(ValueError):
        summarize_citations([])


def test_inclusive_hinges_differ_from_exclusive():
    # Exclusive-median hinges would give Q1 = 1,536 on these spaces.
    spaces = [v[2] for v in PER_PAPER.values()]
    assert summarize(spaces).lower_quartile == 1_728


def test_even_count_hinges():
    s = summarize([1, 2, 3, 4, 5, 6])
    assert (s.lower_quartile, s.median, s.upper_quartile) == (2, 3.5, 5)


@given(st.lists(st.integers(min_value=1, max_value=10**9), min_size=1, max_size=40), st.randoms())
def test_summarize_permutation_invariant(values, rnd):
    shuffled = values[:]
    rnd.shuffle(shuffled)
    s = summarize(values)
    assert summarize(shuffled) == s
    assert s.minimum <= s.lower_quartile <= s.median <= s.upper_quartile <= s.maximum
    if len(values) % 2:
        assert s.median == sorted(values)[len(values) // 2]


def test_round_half_up():
    assert round_half_up(17.5) == 18
    assert round_half_up(70.5) == 71
    assert round_half_up(2.5) == 3
    assert round_half_up(14148.8) == 14149


def test_expected_chance_findings():
    assert expected_chance_findings(20_736, 0.05) == pytest.approx(1_036.8)
    assert present_chance_findings(20_736, 0.05) == 1_037
    assert expected_chance_findings(20, 0.05) == pytest.approx(1.0)
    assert expected_chance_findings(20_054_016, 0.05) == pytest.approx(1_002_700.8)


@given(st.integers(1, 10**12), st.floats(0.001, 0.5), st.integers(1, 50))
def test_chance_findings_linear(space, alpha, k):
    assert expected_chance_findings(space * k, alpha) == pytest.approx(k * expected_chance_findings(space, alpha))
    assert expected_chance_findings(space, alpha / k) == pytest.approx(expected_chance_findings(space, alpha) / k)


@given(st.integers(1, 1000), st.integers(1, 1000), st.integers(0, 40))
def test_multiplicative(o, c, a):
    base = search_space(ssi(o, c, a))
    doubled = search_space(ssi(o, 2 * c, a))
    assert doubled.tests == 2 * base.tests and doubled.space == 2 * base.space
    plus = search_space(ssi(o, c, a + 1))
    assert plus.models == 2 * base.models and plus.space == 2 * base.space


def test_overflow_is_explicit():
    with pytest.raises(SearchSpaceOverflow):
        search_space(ssi(1, 1, 64))
    with pytest.raises(SearchSpaceOverflow):
        search_space(ssi(3, 1, 63))
    assert search_space(ssi(1, 1, 62)).space == 2**62
