"""Numerical core: CI -> standard error -> z -> two-sided p, plus a KS uniformity test.

Effect arithmetic is done on the natural-log scale. Two p-value routes are
offered: the exact normal tail (default) and the Altman-Bland closed-form
approximation ``exp(-0.717|z| - 0.416 z^2)``, which is what most published
back-calculated tables are closest to.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from statistics import NormalDist

log = logging.getLogger(__name__)

_SQRT2 = math.sqrt(2.0)
_STD_NORMAL = NormalDist()


class Method(str, enum.Enum):
    EXACT = "exact"
    ALTMAN_BLAND = "altman-bland"


class DegenerateIntervalError(ValueError):
    """Zero-width (or inverted) interval: the standard error is undefined."""

    def __init__(self, message, study_id=None):
        self.study_id = study_id
        if study_id is not None:
            message = f"study_id '{study_id}': {message}"
        super().__init__(message)


@dataclass(frozen=True)
class PValueRecord:
    study_id: str
    z: float
    p: float
    method: Method
    outcome_label: str = ""


@dataclass(frozen=True)
class UniformityResult:
    d_statistic: float
    n: int
    rejected_at_05: bool

    @property
    def critical_value(self) -> float:
        return ks_critical_05(self.n)


def normal_cdf(x: float) -> float:
    # erfc on the far side keeps relative accuracy in both tails
    if x < 0:
        return 0.5 * math.erfc(-x / _SQRT2)
    return 1.0 - 0.5 * math.erfc(x / _SQRT2)


def normal_quantile(q: float) -> float:
    """Inverse standard normal CDF (Wichura AS241 via the standard library)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie strictly in (0, 1), got {q!r}")
    if q == 0.5:
        return 0.0
    return _STD_NORMAL.inv_cdf(q)


def ci_multiplier(confidence_level: float = 0.95) -> float:
    """Two-sided normal multiplier, 1.959964... for a 95% interval."""
    return normal_quantile(1.0 - (1.0 - confidence_level) / 2.0)


def log_se(ci_lower: float, ci_upper: float, confidence_level: float = 0.95) -> float:
    if not (ci_lower > 0 and ci_upper > 0):
        raise ValueError("confidence limits must be positive")
    if ci_lower == ci_upper:
        raise DegenerateIntervalError("degenerate interval: standard error undefined")
    if ci_lower > ci_upper:
        raise DegenerateIntervalError("inverted confidence limits")
    width = math.log(ci_upper) - math.log(ci_lower)
    return width / (2.0 * ci_multiplier(confidence_level))


def z_score(point_estimate: float, se: float) -> float:
    if point_estimate <= 0 or se <= 0:
        raise ValueError("point estimate and standard error must be positive")
    return math.log(point_estimate) / se


def p_two_sided_exact(z: float) -> float:
    # 2 * (1 - Phi(|z|)) == erfc(|z| / sqrt 2), without the cancellation
    return math.erfc(abs(z) / _SQRT2)


def p_two_sided_altman_bland(z: float) -> float:
    a = abs(z)
    return min(1.0, math.exp(-0.717 * a - 0.416 * a * a))


def p_two_sided(z: float, method: Method | str = Method.EXACT) -> float:
    method = Method(method)
    if method is Method.EXACT:
        return p_two_sided_exact(z)
    return p_two_sided_altman_bland(z)


def convert(estimate, method: Method | str = Method.EXACT) -> PValueRecord:
    method = Method(method)
    try:
        se = log_se(estimate.ci_lower, estimate.ci_upper, estimate.confidence_level)
    except DegenerateIntervalError as exc:
        raise DegenerateIntervalError(str(exc), study_id=estimate.study_id) from None
    z = z_score(estimate.point_estimate, se)
    p = p_two_sided(z, method)
    if abs(z) > 3:
        other = Method.ALTMAN_BLAND if method is Method.EXACT else Method.EXACT
        log.debug(
            "%s: |z| = %.3g beyond the approximation's working range "
            "(%s p = %.3g, %s p = %.3g)",
            estimate.study_id, abs(z), method.value, p, other.value, p_two_sided(z, other),
        )
    return PValueRecord(estimate.study_id, z, p, method, estimate.outcome_label)


def convert_batch(estimates, method: Method | str = Method.EXACT) -> list[PValueRecord]:
    return [convert(e, method) for e in estimates]


def ks_critical_05(n: int) -> float:
    """Asymptotic 5% critical value of the one-sample KS statistic."""
    return 1.36 / math.sqrt(n)


def ks_uniformity(pvalues) -> UniformityResult:
    """One-sample Kolmogorov-Smirnov D against Uniform(0, 1).

    Rejection uses the asymptotic 5% critical value 1.36/sqrt(n).
    """
    xs = sorted(float(p) for p in pvalues)
    n = len(xs)
    if n == 0:
        raise ValueError("KS test needs at least one value")
    d = 0.0
    for i, x in enumerate(xs, start=1):
        d = max(d, i / n - x, x - (i - 1) / n)
    d = min(max(d, 0.0), 1.0)
    return UniformityResult(d, n, d > ks_critical_05(n))
