"""Seeded measurement sampling and the empirical shot-budget check.

Draws use numpy's counter-based Philox bit generator; trial ``i`` of a
harness seeded with ``s`` uses seed ``s + i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .planner import shot_budget
from .spectral import PhaseDistribution

GENERATOR_NAME = "numpy.random.Philox"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


@dataclass(frozen=True)
class ShotRecord:
    seed: int
    m: int
    counts: np.ndarray
    empirical_top: int
    generator: str = GENERATOR_NAME


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    return cdf / cdf[-1]


def sample_counts(cdf: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(m)
    idx = np.searchsorted(cdf, u, side="right")
    np.minimum(idx, len(cdf) - 1, out=idx)
    return np.bincount(idx, minlength=len(cdf))


def sample_shots(pd: PhaseDistribution, m: int, seed: int) -> ShotRecord:
    """``m`` inverse-CDF draws from the outcome table."""
    if m < 1:
        raise DomainError("m must be >= 1")
    counts = sample_counts(_cdf(pd.probs), m, make_rng(seed))
    return ShotRecord(seed=int(seed), m=int(m), counts=counts, empirical_top=int(np.argmax(counts)))


def empirical_estimator(rec: ShotRecord, l: int) -> float:
    return float(rec.counts[l]) / rec.m


def z_statistic(rec: ShotRecord, l: int, j: int) -> int:
    if l == j:
        raise DomainError("z statistic needs two distinct outcomes")
    return int(rec.counts[l]) - int(rec.counts[j])


def trial_failed(counts: np.ndarray, l_star: int) -> bool:
    # a tie counts as a failure
    others = np.delete(counts, l_star)
    return bool(others.size and others.max() >= counts[l_star])


@dataclass(frozen=True)
class TrialReport:
    m_eps: int
    failure_rate: float
    failures: int
    trials: int
    seed: int
    epsilon: float
    delta_gap: float
    generator: str = GENERATOR_NAME

    def to_dict(self) -> dict:
        return {
            "m_eps": self.m_eps,
            "failure_rate": self.failure_rate,
            "failures": self.failures,
            "trials": self.trials,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "delta_gap": self.delta_gap,
            "generator": self.generator,
        }


def hoeffding_trial(pd: PhaseDistribution, epsilon: float, trials: int, seed: int) -> TrialReport:
    """Fraction of ``trials`` runs of ``m_eps`` shots whose top count is not ``l*``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    m_eps = shot_budget(epsilon, pd.delta_gap)
    cdf = _cdf(pd.probs)
    failures = 0
    for i in range(trials):
        counts = sample_counts(cdf, m_eps, make_rng(seed + i))
        failures += trial_failed(counts, pd.l_star)
    return TrialReport(
        m_eps=m_eps,
        failure_rate=failures / trials,
        failures=failures,
        trials=trials,
        seed=int(seed),
        epsilon=float(epsilon),
        delta_gap=float(pd.delta_gap),
    )


def failure_tolerance(epsilon: float, trials: int) -> float:
    """``epsilon + 3 sigma`` of a binomial failure count."""
    return epsilon + 3.0 * np.sqrt(epsilon * (1 - epsilon) / trials)


def circular_spread(counts: np.ndarray, center: int) -> float:
    """Mean squared circular distance of the shots from ``center``."""
    size = len(counts)
    d = np.abs(np.arange(size) - center)
    d = np.minimum(d, size - d)
    total = counts.sum()
    return float(np.dot(counts, d.astype(float) ** 2) / total) if total else 0.0


def window_count(counts: np.ndarray, center: int, e: int) -> int:
    idx = np.unique(np.mod(np.arange(center - e, center + e + 1), len(counts)))
    return int(counts[idx].sum())
