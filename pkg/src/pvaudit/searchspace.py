"""Analysis search-space counting and five-number summaries.

A base paper with O outcomes, C causes (predictors) and A adjustment
covariates can ask O x C questions (tests), each under 2^A covariate subsets
(models); the search space is their product.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction

from .estimates import SearchSpaceInput

MAX_COVARIATES = 63
INT64_MAX = 2**63 - 1

SUMMARY_LABELS = (
    "minimum", "lower quartile", "median", "upper quartile", "maximum", "mean",
)


class SearchSpaceOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class SearchSpaceRecord:
    input: SearchSpaceInput
    tests: int
    models: int
    space: int


@dataclass(frozen=True)
class FiveNumberSummary:
    minimum: float
    lower_quartile: float
    median: float
    upper_quartile: float
    maximum: float
    mean: float
    rounding_applied: bool = False

    def values(self) -> tuple:
        return (self.minimum, self.lower_quartile, self.median,
                self.upper_quartile, self.maximum, self.mean)

    def rounded(self) -> FiveNumberSummary:
        """Half-up integer presentation (17.5 -> 18)."""
        if self.rounding_applied:
            return self
        r = [round_half_up(v) for v in self.values()]
        return FiveNumberSummary(*r, rounding_applied=True)


def round_half_up(x) -> int:
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        x = Decimal(repr(x))
    elif isinstance(x, Fraction):
        x = Decimal(x.numerator) / Decimal(x.denominator)
    return int(Decimal(x).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def search_space(inp: SearchSpaceInput) -> SearchSpaceRecord:
    if inp.outcomes < 1 or inp.causes < 1:
        raise ValueError("outcomes and causes must be ≥ 1")
    if inp.covariates < 0:
        raise ValueError("covariates must be ≥ 0")
    if inp.covariates > MAX_COVARIATES:
        raise SearchSpaceOverflow(
            f"{inp.paper_id}: {inp.covariates} covariates exceeds the supported "
            f"maximum of {MAX_COVARIATES} (2^A overflows 64-bit)"
        )
    tests = inp.outcomes * inp.causes
    models = 1 << inp.covariates
    space = tests * models
    if space > INT64_MAX:
        raise SearchSpaceOverflow(f"{inp.paper_id}: search space exceeds 2^63 - 1")
    return SearchSpaceRecord(inp, tests, models, space)


def expected_chance_findings(space: int, alpha: float = 0.05) -> float:
    """Expected count of nominally significant results when every test is null."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * space


def present_chance_findings(space: int, alpha: float = 0.05) -> int:
    # decimal product so 0.05 * 20736 = 1036.8 exactly before rounding
    space = Decimal(space) if isinstance(space, int) else Decimal(repr(float(space)))
    return round_half_up(Decimal(repr(float(alpha))) * space)


def _median_sorted(xs):
    n = len(xs)
    mid = n // 2
    if n % 2:
        return xs[mid]
    return Fraction(xs[mid - 1] + xs[mid]) / 2


def _as_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def summarize(values) -> FiveNumberSummary:
    """Min, Tukey hinges, median, max and mean of a batch of numbers.

    Hinges are medians of the lower and upper halves, each half including the
    overall median when N is odd. Integers are handled in exact arithmetic.
    """
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        raise ValueError("cannot summarize an empty collection")
    exact = all(isinstance(x, int) for x in xs)
    conv = Fraction if exact else float
    xs = [conv(x) for x in xs]
    half = (n + 1) // 2
    lower, upper = xs[:half], xs[n - half:]
    mean = sum(xs, conv(0)) / n
    stats = [xs[0], _median_sorted(lower), _median_sorted(xs),
             _median_sorted(upper), xs[-1], mean]
    return FiveNumberSummary(*[_as_number(v) for v in stats])


def summarize_records(records) -> dict[str, FiveNumberSummary]:
    """Summaries of every per-paper column over a set of search-space records."""
    records = list(records)
    columns = {
        "foods": [r.input.foods for r in records],
        "outcomes": [r.input.outcomes for r in records],
        "causes": [r.input.causes for r in records],
        "covariates": [r.input.covariates for r in records],
        "tests": [r.tests for r in records],
        "models": [r.models for r in records],
        "space": [r.space for r in records],
    }
    return {name: summarize(vals) for name, vals in columns.items()}


def summarize_citations(counts) -> dict[str, FiveNumberSummary]:
    counts = list(counts)
    if not counts:
        raise ValueError("cannot summarize an empty collection")
    return {
        "papers_total": summarize([c.papers_total for c in counts]),
        "papers_cohort_ffq": summarize([c.papers_cohort_ffq for c in counts]),
    }
