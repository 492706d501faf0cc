"""Seeded Monte Carlo: null and mixture p-value sets, MTMM false-positive counts.

Every trial gets its own generator, derived from ``(seed, trial index)`` with
numpy's SeedSequence spawn keys, so results do not depend on execution order.
The bit generator is PCG64.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from .pplot import DEFAULT_THRESHOLDS, Thresholds, Verdict, build_series, classify
from .stats import Method, PValueRecord, p_two_sided_exact

RNG_ALGORITHM = "PCG64 (numpy.random.Generator); trial stream = SeedSequence(seed, spawn_key=(trial,))"


@dataclass(frozen=True)
class SimulationConfig:
    n_null: int = 25
    n_alt: int = 0
    alt_mean_z: float = 0.0
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.n_null < 0 or self.n_alt < 0:
            raise ValueError("n_null and n_alt must be non-negative")
        if self.n_null + self.n_alt < 1:
            raise ValueError("need at least one p-value per trial (n_null + n_alt ≥ 1)")
        if self.alt_mean_z < 0:
            raise ValueError("alt_mean_z must be ≥ 0")
        if self.trials < 1:
            raise ValueError("trials must be ≥ 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimulationReport:
    config: SimulationConfig
    thresholds: Thresholds
    verdicts: tuple[Verdict, ...]
    fraction_below_05: float
    verdict_frequencies: dict[Verdict, int]
    rng_algorithm: str = RNG_ALGORITHM

    def frequency(self, verdict: Verdict) -> float:
        return self.verdict_frequencies[verdict] / len(self.verdicts)

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "thresholds": asdict(self.thresholds),
            "rng_algorithm": self.rng_algorithm,
            "seed": self.config.seed,
            "fraction_below_05": self.fraction_below_05,
            "verdict_frequencies": {v.value: c for v, c in self.verdict_frequencies.items()},
            "verdicts": [v.value for v in self.verdicts],
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def draw_null_pvalues(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 0:
        raise ValueError("n must be ≥ 0")
    return rng.random(n)


def draw_alt_pvalues(n: int, alt_mean_z: float, rng: np.random.Generator) -> np.ndarray:
    """Two-sided exact p-values of z ~ Normal(alt_mean_z, 1)."""
    if n < 0:
        raise ValueError("n must be ≥ 0")
    z = rng.normal(alt_mean_z, 1.0, n)
    return np.array([p_two_sided_exact(float(v)) for v in z], dtype=float)


def mtmm_false_positive_run(outcomes: int, causes: int, alpha: float,
                            rng: np.random.Generator) -> int:
    """Count of nominally significant results among O x C null tests."""
    if outcomes < 1 or causes < 1:
        raise ValueError("outcomes and causes must be ≥ 1")
    return int(np.count_nonzero(draw_null_pvalues(outcomes * causes, rng) < alpha))


def mtmm_false_positive_counts(outcomes: int, causes: int, alpha: float = 0.05,
                               trials: int = 10_000, seed: int = 0) -> np.ndarray:
    return np.array([
        mtmm_false_positive_run(outcomes, causes, alpha, trial_rng(seed, t))
        for t in range(trials)
    ])


def simulate_series(config: SimulationConfig, trial: int):
    rng = trial_rng(config.seed, trial)
    alt = draw_alt_pvalues(config.n_alt, config.alt_mean_z, rng)
    null = draw_null_pvalues(config.n_null, rng)
    records = [PValueRecord(f"alt-{i:04d}", float("nan"), float(p), Method.EXACT)
               for i, p in enumerate(alt)]
    records += [PValueRecord(f"null-{i:04d}", float("nan"), float(p), Method.EXACT)
                for i, p in enumerate(null)]
    return build_series(records, "simulated")


def calibrate_classifier(config: SimulationConfig,
                         thresholds: Thresholds = DEFAULT_THRESHOLDS) -> SimulationReport:
    """Classify ``config.trials`` simulated series and tally the verdicts."""
    verdicts = []
    below = 0
    total = 0
    for t in range(config.trials):
        series = simulate_series(config, t)
        verdicts.append(classify(series, thresholds).verdict)
        below += sum(1 for p in series.pvalues if p < 0.05)
        total += len(series)
    counts = Counter(verdicts)
    freqs = {v: counts.get(v, 0) for v in Verdict}
    return SimulationReport(
        config=config,
        thresholds=thresholds,
        verdicts=tuple(verdicts),
        fraction_below_05=below / total,
        verdict_frequencies=freqs,
    )
