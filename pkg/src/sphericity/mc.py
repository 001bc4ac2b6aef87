"""Replicated simulation campaigns: empirical size, power, independence.

Each replication draws one dataset and evaluates every selected test on
that same dataset, which is what makes the joint (independence)
diagnostics meaningful.  Replications are pure functions of
``(master_seed, rep_index)`` and are aggregated in replication order, so
reports are identical no matter how many worker processes run them.
The worker count comes from the ``SPHERICITY_WORKERS`` environment
variable (default: all CPUs) and never affects results.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .datagen import (
    BlockSpiked,
    CovarianceModel,
    FAMILIES,
    NullIdentity,
    ScenarioSpec,
    sample_scenario,
)
from .errors import InvalidConfigError
from .tests import TEST_NAMES, run_suite

PAIRS = (("NS", "NM"), ("SS", "SM"))


@dataclass(frozen=True)
class Campaign:
    """One simulation configuration: scenario template plus grid and level."""

    family: str
    n: int
    p: int
    cov_grid: Tuple[CovarianceModel, ...]
    tests: Tuple[str, ...]
    reps: int
    alpha: float
    master_seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfigError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}"
            )
        if self.n < 2 or self.p < 2:
            raise InvalidConfigError(
                f"need n >= 2 and p >= 2, got n={self.n}, p={self.p}"
            )
        if self.reps < 1:
            raise InvalidConfigError(f"reps must be >= 1, got {self.reps}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.tests:
            raise InvalidConfigError("tests must be nonempty")
        unknown = [t for t in self.tests if t not in TEST_NAMES]
        if unknown:
            raise InvalidConfigError(
                f"unknown tests {unknown}; valid names are {list(TEST_NAMES)}"
            )
        if not self.cov_grid:
            raise InvalidConfigError("cov_grid must be nonempty")


@dataclass(frozen=True)
class ReportRow:
    """Rejection summary for one (test, covariance model) cell."""

    test: str
    cov: str
    s: Optional[int]
    a: Optional[float]
    rejections: int
    rejection_rate: float
    mc_standard_error: float
    reps: int


@dataclass(frozen=True)
class IndependenceRecord:
    """Joint behavior of a (sum-type, max-type) pair under one model."""

    test_first: str
    test_second: str
    cov: str
    s: Optional[int]
    a: Optional[float]
    correlation: float
    marginal_rate_first: float
    marginal_rate_second: float
    joint_rate: float
    product_rate: float
    half_alpha: float
    reps: int


@dataclass
class SimulationReport:
    """Long-format rejection rates plus per-rep p-values for diagnostics."""

    kind: str
    family: str
    n: int
    p: int
    alpha: float
    reps: int
    master_seed: int
    tests: Tuple[str, ...]
    rows: List[ReportRow]
    p_values: Dict[str, Dict[str, np.ndarray]]


@dataclass
class IndependenceReport:
    kind: str
    family: str
    n: int
    p: int
    alpha: float
    reps: int
    master_seed: int
    records: List[IndependenceRecord]


def _resolve_workers() -> int:
    raw = os.environ.get("SPHERICITY_WORKERS", "")
    if raw.strip():
        try:
            workers = int(raw)
        except ValueError:
            raise InvalidConfigError(
                f"SPHERICITY_WORKERS must be an integer, got {raw!r}"
            ) from None
        if workers < 1:
            raise InvalidConfigError("SPHERICITY_WORKERS must be >= 1")
        return workers
    return os.cpu_count() or 1


def _replicate(args):
    spec, rep_index, tests = args
    data = sample_scenario(spec, rep_index)
    outcomes = run_suite(data, tests)
    stats = [outcomes[t].statistic for t in tests]
    pvals = [outcomes[t].p_value for t in tests]
    return stats, pvals


def _run_cell(campaign: Campaign, cov: CovarianceModel, pool):
    """Statistics and p-values for one covariance model, (reps, ntests)."""
    spec = ScenarioSpec(
        family=campaign.family,
        n=campaign.n,
        p=campaign.p,
        cov=cov,
        master_seed=campaign.master_seed,
    )
    tasks = ((spec, rep, campaign.tests) for rep in range(campaign.reps))
    if pool is None:
        results = [_replicate(t) for t in tasks]
    else:
        chunk = max(1, min(64, campaign.reps // (pool._max_workers * 4) or 1))
        results = list(pool.map(_replicate, tasks, chunksize=chunk))
    stats = np.array([r[0] for r in results])
    pvals = np.array([r[1] for r in results])
    return stats, pvals


def _run_cells(campaign: Campaign, covs: Sequence[CovarianceModel]):
    workers = _resolve_workers()
    if workers == 1:
        return [_run_cell(campaign, cov, None) for cov in covs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [_run_cell(campaign, cov, pool) for cov in covs]


def _model_fields(cov: CovarianceModel):
    if isinstance(cov, BlockSpiked):
        return cov.s, cov.a
    return None, None


def _mc_se(rate: float, reps: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / reps)


def _summarize(campaign: Campaign, covs, cells, kind: str) -> SimulationReport:
    rows: List[ReportRow] = []
    p_values: Dict[str, Dict[str, np.ndarray]] = {}
    for cov, (_, pvals) in zip(covs, cells):
        s, a = _model_fields(cov)
        p_values[cov.label()] = {
            t: pvals[:, j].copy() for j, t in enumerate(campaign.tests)
        }
        for j, t in enumerate(campaign.tests):
            hits = int(np.count_nonzero(pvals[:, j] <= campaign.alpha))
            rate = hits / campaign.reps
            rows.append(
                ReportRow(
                    test=t,
                    cov=cov.label(),
                    s=s,
                    a=a,
                    rejections=hits,
                    rejection_rate=rate,
                    mc_standard_error=_mc_se(rate, campaign.reps),
                    reps=campaign.reps,
                )
            )
    return SimulationReport(
        kind=kind,
        family=campaign.family,
        n=campaign.n,
        p=campaign.p,
        alpha=campaign.alpha,
        reps=campaign.reps,
        master_seed=campaign.master_seed,
        tests=campaign.tests,
        rows=rows,
        p_values=p_values,
    )


def estimate_size(campaign: Campaign) -> SimulationReport:
    """Empirical sizes under the null models in the campaign grid."""
    for cov in campaign.cov_grid:
        if not isinstance(cov, NullIdentity):
            raise InvalidConfigError(
                "size campaigns require NullIdentity covariance models, "
                f"got {cov.label()}"
            )
    cells = _run_cells(campaign, campaign.cov_grid)
    return _summarize(campaign, campaign.cov_grid, cells, "size")


def power_curve_sparsity(
    base: Campaign, s_grid: Sequence[int], a: float = 0.5
) -> SimulationReport:
    """Rejection rates across block sizes at fixed signal strength."""
    covs = []
    for s in s_grid:
        s = int(s)
        if not 2 <= s <= base.p:
            raise InvalidConfigError(
                f"sparsity level s={s} must lie in [2, p={base.p}]"
            )
        model = BlockSpiked(s=s, a=a)
        if model.delta >= 1.0:
            raise InvalidConfigError(
                f"delta = a/sqrt(s) = {model.delta:g} must be below 1 (s={s}, a={a})"
            )
        covs.append(model)
    campaign = replace(base, cov_grid=tuple(covs))
    cells = _run_cells(campaign, campaign.cov_grid)
    return _summarize(campaign, campaign.cov_grid, cells, "power-sparsity")


def power_curve_strength(
    base: Campaign, s: int, a_grid: Sequence[float]
) -> SimulationReport:
    """Rejection rates across signal strengths at fixed block size."""
    if not 2 <= s <= base.p:
        raise InvalidConfigError(f"sparsity level s={s} must lie in [2, p={base.p}]")
    covs = []
    for a in a_grid:
        model = BlockSpiked(s=s, a=float(a))
        if model.delta >= 1.0:
            raise InvalidConfigError(
                f"delta = a/sqrt(s) = {model.delta:g} must be below 1 (s={s}, a={a})"
            )
        covs.append(model)
    campaign = replace(base, cov_grid=tuple(covs))
    cells = _run_cells(campaign, campaign.cov_grid)
    return _summarize(campaign, campaign.cov_grid, cells, "power-strength")


def independence_diagnostic(
    campaign: Campaign, pair: Tuple[str, str]
) -> IndependenceReport:
    """Empirical dependence between a sum-type and a max-type statistic.

    For each covariance model in the grid, reports the sample correlation
    of the two statistics across replications and compares the joint
    rejection rate at level alpha/2 per test against the product of the
    marginal rates.  Under asymptotic independence the difference
    vanishes.
    """
    pair = (pair[0].upper(), pair[1].upper())
    if pair not in PAIRS:
        raise InvalidConfigError(f"pair must be one of {PAIRS}, got {pair}")
    campaign = replace(campaign, tests=pair)
    cells = _run_cells(campaign, campaign.cov_grid)
    half = campaign.alpha / 2.0
    records: List[IndependenceRecord] = []
    for cov, (stats, pvals) in zip(campaign.cov_grid, cells):
        s, a = _model_fields(cov)
        if campaign.reps >= 2 and np.std(stats[:, 0]) > 0 and np.std(stats[:, 1]) > 0:
            corr = float(np.corrcoef(stats[:, 0], stats[:, 1])[0, 1])
        else:
            corr = float("nan")
        r1 = pvals[:, 0] <= half
        r2 = pvals[:, 1] <= half
        m1 = float(np.mean(r1))
        m2 = float(np.mean(r2))
        joint = float(np.mean(r1 & r2))
        records.append(
            IndependenceRecord(
                test_first=pair[0],
                test_second=pair[1],
                cov=cov.label(),
                s=s,
                a=a,
                correlation=corr,
                marginal_rate_first=m1,
                marginal_rate_second=m2,
                joint_rate=joint,
                product_rate=m1 * m2,
                half_alpha=half,
                reps=campaign.reps,
            )
        )
    return IndependenceReport(
        kind="independence",
        family=campaign.family,
        n=campaign.n,
        p=campaign.p,
        alpha=campaign.alpha,
        reps=campaign.reps,
        master_seed=campaign.master_seed,
        records=records,
    )
