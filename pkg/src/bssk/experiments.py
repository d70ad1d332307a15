"""Seeded Monte Carlo campaigns over disorder realizations.

Each trial draws its own coupling matrix from a counter-based stream keyed
by (master_seed, trial index), so campaigns are reproducible and their
results do not depend on how trials are chunked across workers. Ratios
r1, r2 always enter finite-size predictions as the exact values N1/N, N2/N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .disorder import DisorderSpec, sample_disorder, stream_rng
from .errors import ConfigError, ParameterError, RareEventError
from .partition import finite_n_prediction
from .spectra import (
    ClassicalLocations,
    RigidityReport,
    classical_locations,
    gram_eigenvalues,
    mp_law,
    rigidity_report,
)
from .theory import HIGH, LOW, regime_constants

MODES = ("high_fluct", "low_fluct", "edge", "rigidity")


@dataclass(frozen=True)
class ExperimentConfig:
    n1: int
    n2: int
    beta: float
    spec: DisorderSpec
    trials: int
    master_seed: int
    mode: str


@dataclass(frozen=True, eq=False)
class ExperimentSummary:
    samples: np.ndarray
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    ks_distance: float | None
    failures: int


@dataclass(frozen=True, eq=False)
class RigidityOutcome:
    summary: ExperimentSummary  # statistics of the per-trial max ratios
    reports: tuple[RigidityReport, ...]
    total_violations: int


def _normal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def ks_distance_normal(samples: np.ndarray, mean: float, variance: float) -> float:
    """One-sample Kolmogorov-Smirnov distance against N(mean, variance)."""
    if variance <= 0.0:
        raise ParameterError("reference variance must be positive")
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    cdf = _normal_cdf((x - mean) / math.sqrt(variance))
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def ks_distance_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    ca = np.searchsorted(a, grid, side="right") / len(a)
    cb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(ca - cb)))


def summarize(
    samples,
    reference_mean: float | None = None,
    reference_var: float | None = None,
    failures: int = 0,
) -> ExperimentSummary:
    """Moment summary by a stable one-pass accumulation.

    Variance is the unbiased estimator; skewness and excess kurtosis use
    central moments and are defined as 0 whenever the variance vanishes.
    A KS distance against N(reference_mean, reference_var) is attached when
    both references are given.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ParameterError("samples must be a nonempty 1-d array")
    mean = 0.0
    m2 = m3 = m4 = 0.0
    for k, v in enumerate(x, start=1):
        delta = v - mean
        dn = delta / k
        term = delta * dn * (k - 1)
        mean += dn
        m4 += term * dn * dn * (k * k - 3 * k + 3) + 6.0 * dn * dn * m2 - 4.0 * dn * m3
        m3 += term * dn * (k - 2) - 3.0 * dn * m2
        m2 += term
    n = len(x)
    variance = m2 / (n - 1) if n > 1 else 0.0
    if m2 > 0.0:
        skew = math.sqrt(n) * m3 / m2**1.5
        kurt = n * m4 / (m2 * m2) - 3.0
    else:
        skew = 0.0
        kurt = 0.0
    ks = None
    if reference_mean is not None and reference_var is not None:
        ks = ks_distance_normal(x, reference_mean, reference_var)
    out = np.array(x)
    out.setflags(write=False)
    return ExperimentSummary(
        samples=out,
        mean=float(mean),
        variance=float(variance),
        skewness=float(skew),
        excess_kurtosis=float(kurt),
        ks_distance=ks,
        failures=failures,
    )


def _validate(config: ExperimentConfig, expected_modes: tuple[str, ...]) -> None:
    if config.mode not in MODES:
        raise ConfigError(f"unknown mode {config.mode!r}")
    if config.mode not in expected_modes:
        raise ConfigError(f"mode {config.mode!r} not supported here, expected {expected_modes}")
    if config.trials < 1:
        raise ConfigError(f"trials must be >= 1, got {config.trials}")
    if config.n1 < 1 or config.n2 < 1:
        raise ConfigError(f"dimensions must be positive, got ({config.n1}, {config.n2})")
    if config.beta <= 0.0:
        raise ConfigError(f"beta must be positive, got {config.beta}")


def _chunk_order(trials: int, chunks: int) -> list[np.ndarray]:
    idx = np.arange(trials)
    return [idx[c::chunks] for c in range(chunks)]


def fluctuation_statistic_per_trial(
    config: ExperimentConfig, trial: int
) -> tuple[float, float]:
    """(rescaled free-energy statistic, mu_1) for a single trial."""
    N = config.n1 + config.n2
    r1, r2 = config.n1 / N, config.n2 / N
    rc = regime_constants(config.beta, r1, r2, config.spec.w4)
    J = sample_disorder(config.spec, config.n1, config.n2, config.master_seed, trial)
    spectrum = gram_eigenvalues(J)
    pred = finite_n_prediction(spectrum, config.beta, r1, r2)
    mu1 = float(spectrum.values[0])
    if rc.regime == HIGH:
        return N * (pred - rc.f_limit), mu1
    return N ** (2.0 / 3.0) / rc.a_scale * (pred - rc.f_limit), mu1


def fluctuation_rows(
    config: ExperimentConfig, chunks: int = 1
) -> tuple[list[tuple[int, float, float]], int]:
    """Per-trial (trial, statistic, mu_1) rows in trial order, plus failures.

    Trials where the deterministic point z_c fails to clear mu_1 are dropped
    and counted. Rows are reassembled by trial index, so any chunk count
    yields identical output.
    """
    _validate(config, ("high_fluct", "low_fluct"))
    N = config.n1 + config.n2
    rc = regime_constants(config.beta, config.n1 / N, config.n2 / N, config.spec.w4)
    expected = HIGH if config.mode == "high_fluct" else LOW
    if rc.regime != expected:
        raise ConfigError(
            f"mode {config.mode!r} needs the {expected} regime, parameters sit in {rc.regime}"
        )
    rows: dict[int, tuple[float, float]] = {}
    failures = 0
    for sel in _chunk_order(config.trials, chunks):
        for t in sel:
            try:
                rows[int(t)] = fluctuation_statistic_per_trial(config, int(t))
            except RareEventError:
                failures += 1
    ordered = [(t, stat, mu1) for t, (stat, mu1) in sorted(rows.items())]
    return ordered, failures


def run_fluctuation_experiment(config: ExperimentConfig, chunks: int = 1) -> ExperimentSummary:
    """Free-energy fluctuation campaign in either noncritical regime.

    High mode compares N (F_N - F(beta)) against the Gaussian prediction
    (the summary carries the KS distance); low mode collects the rescaled
    Tracy-Widom statistic. Trials with z_c <= mu_1 are dropped and counted
    as failures.
    """
    rows, failures = fluctuation_rows(config, chunks)
    samples = np.array([stat for _, stat, _ in rows])
    if config.mode == "high_fluct":
        N = config.n1 + config.n2
        rc = regime_constants(config.beta, config.n1 / N, config.n2 / N, config.spec.w4)
        return summarize(samples, rc.mu, rc.sigma2, failures=failures)
    return summarize(samples, failures=failures)


def edge_statistic_per_trial(config: ExperimentConfig, trial: int) -> tuple[float, float]:
    """(rescaled largest-eigenvalue statistic, mu_1) for a single trial."""
    n1, n2 = config.n1, config.n2
    law = mp_law(n1 / (n1 + n2), n2 / (n1 + n2))
    scale = n1 / (math.sqrt(n1) + math.sqrt(n2)) * (1.0 / math.sqrt(n1) + 1.0 / math.sqrt(n2)) ** (
        -1.0 / 3.0
    )
    J = sample_disorder(config.spec, n1, n2, config.master_seed, trial)
    mu1 = float(gram_eigenvalues(J).values[0])
    return scale * (mu1 - law.d_plus), mu1


def edge_rows(
    config: ExperimentConfig, chunks: int = 1
) -> list[tuple[int, float, float]]:
    _validate(config, ("edge",))
    rows: dict[int, tuple[float, float]] = {}
    for sel in _chunk_order(config.trials, chunks):
        for t in sel:
            rows[int(t)] = edge_statistic_per_trial(config, int(t))
    return [(t, stat, mu1) for t, (stat, mu1) in sorted(rows.items())]


def run_edge_experiment(config: ExperimentConfig, chunks: int = 1) -> ExperimentSummary:
    """Largest-eigenvalue campaign: N1/(sqrt(N1)+sqrt(N2)) (1/sqrt(N1)+1/sqrt(N2))^{-1/3} (mu_1 - d+)."""
    rows = edge_rows(config, chunks)
    return summarize(np.array([stat for _, stat, _ in rows]))


def goe_oracle(n: int, trials: int, seed: int) -> ExperimentSummary:
    """Reference sample of n^{2/3} (lambda_1 - 2) for GOE matrices.

    Matrices are (A + A^T)/sqrt(2) with iid standard normal A, scaled by
    1/sqrt(n): variance 2 on the diagonal and 1 off it.
    """
    if n < 50:
        raise ParameterError(f"GOE oracle needs n >= 50, got {n}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    stats = np.empty(trials)
    for t in range(trials):
        rng = stream_rng(seed, t)
        a = rng.standard_normal((n, n))
        w = (a + a.T) / math.sqrt(2.0)
        top = float(np.linalg.eigvalsh(w / math.sqrt(n))[-1])
        stats[t] = n ** (2.0 / 3.0) * (top - 2.0)
    return summarize(stats)


def run_rigidity_experiment(config: ExperimentConfig, epsilon: float = 0.3) -> RigidityOutcome:
    """Per-trial rigidity reports against the classical locations."""
    _validate(config, ("rigidity",))
    N = config.n1 + config.n2
    law = mp_law(config.n1 / N, config.n2 / N)
    locs: ClassicalLocations = classical_locations(law, config.n2)
    reports = []
    for t in range(config.trials):
        J = sample_disorder(config.spec, config.n1, config.n2, config.master_seed, t)
        spectrum = gram_eigenvalues(J)
        reports.append(rigidity_report(spectrum, locs, epsilon))
    summary = summarize(np.array([r.max_ratio for r in reports]))
    return RigidityOutcome(
        summary=summary,
        reports=tuple(reports),
        total_violations=int(sum(r.violations for r in reports)),
    )
