"""Monte Carlo ensemble averages and convergence diagnostics"""

import math
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd
import scipy.special
import scipy.stats

from palintoep.ensemble import EnsembleSpec, link_table, sample_entry_block
from palintoep.estimation.fit import (
    ExtrapolationFit,
    default_order,
    extrapolate,
)
from palintoep.helper import FitError, worker_count
from palintoep.helper.logging import LOGGER
from palintoep.spectra import (
    batched_eigenvalues,
    moments_from_eigenvalues,
    trace_power_moments,
)

__all__ = [
    'EnsembleRun',
    'ExtrapolationFit',
    'Method',
    'MomentEstimate',
    'MomentTable',
    'OddMomentDecay',
    'TailComparison',
    'VarianceReport',
    'default_order',
    'extrapolate',
    'gaussian_tail',
    'moment_table',
    'monte_carlo_moments',
    'odd_moment_decay',
    'odd_moment_report',
    'read_moment_table',
    'run_ensemble',
    'tail_comparison',
    'tail_mass',
    'variance_diagnostic',
    'variance_report',
    'write_moment_table',
]

MOMENT_TABLE_COLUMNS = ['N', 'sims', 'moment', 'mean', 'stderr']

# Cells (batch * N * N) of one block of stacked matrices.
_BLOCK_CELLS = 2**22
_MAX_BLOCK = 256


class Method(str, Enum):
    EIGENVALUES = 'eigenvalues'
    TRACE = 'trace'


@dataclass(frozen=True)
class MomentEstimate:
    """Ensemble mean of one moment order with its standard error."""

    k: int
    mean: float
    stderr: float
    num_samples: int


@dataclass
class EnsembleRun:
    """Per-matrix moments of num_samples members of one ensemble."""

    spec: EnsembleSpec
    moments: np.ndarray
    eigenvalues: np.ndarray | None = None

    @property
    def num_samples(self) -> int:
        return self.moments.shape[0]

    @property
    def k_max(self) -> int:
        return self.moments.shape[1] - 1

    def estimate(self, k: int) -> MomentEstimate:
        column = self.moments[:, k]
        stderr = float(column.std(ddof=1)) / math.sqrt(len(column))
        return MomentEstimate(k, float(column.mean()), stderr, len(column))

    def estimates(self) -> list[MomentEstimate]:
        return [self.estimate(k) for k in range(self.k_max + 1)]


def _block_size(N: int) -> int:
    return max(1, min(_MAX_BLOCK, _BLOCK_CELLS // (N * N)))


def _simulate_block(task: tuple) -> tuple[np.ndarray, np.ndarray | None]:
    """Build and analyze samples start..stop-1 of one ensemble."""
    spec, start, stop, k_max, method, keep_eigenvalues = task
    entries = sample_entry_block(spec, start, stop)
    dense = entries[:, link_table(spec.N, spec.n)]
    eigenvalues = None
    if method == Method.TRACE:
        moments = trace_power_moments(dense, k_max)
        if keep_eigenvalues:
            eigenvalues = batched_eigenvalues(dense, first_index=start)
    else:
        eigenvalues = batched_eigenvalues(dense, first_index=start)
        moments = moments_from_eigenvalues(eigenvalues, k_max)
    if keep_eigenvalues:
        return moments, eigenvalues / math.sqrt(spec.N)
    return moments, None


def run_ensemble(
    spec: EnsembleSpec,
    num_matrices: int,
    k_max: int,
    method: Method | str = Method.EIGENVALUES,
    keep_eigenvalues: bool = False,
    workers: int | None = None,
) -> EnsembleRun:
    """Sample num_matrices members and compute their moments.

    Samples are split into blocks whose size depends on N only; blocks are
    dispatched to a process pool and reassembled in sample order, so the
    output does not depend on the number of workers.
    """
    if num_matrices < 2:
        raise ValueError(f"need at least 2 matrices, got {num_matrices}")
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    method = Method(method)
    workers = workers or worker_count()
    LOGGER.info(
        f"Simulating n={spec.n} N={spec.N} with {num_matrices} matrices "
        f"({spec.distribution.name}, {method.value})..."
    )
    step = _block_size(spec.N)
    tasks = [
        (
            spec,
            start,
            min(start + step, num_matrices),
            k_max,
            method,
            keep_eigenvalues,
        )
        for start in range(0, num_matrices, step)
    ]
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            results = pool.map(_simulate_block, tasks)
    else:
        results = [_simulate_block(task) for task in tasks]
    moments = np.concatenate([block for block, _ in results])
    eigenvalues = None
    if keep_eigenvalues:
        eigenvalues = np.concatenate([block for _, block in results]).ravel()
    return EnsembleRun(spec, moments, eigenvalues)


def monte_carlo_moments(
    spec: EnsembleSpec,
    num_matrices: int,
    k_max: int,
    method: Method | str = Method.EIGENVALUES,
) -> list[MomentEstimate]:
    """Mean and standard error of every moment order 0..k_max."""
    return run_ensemble(spec, num_matrices, k_max, method).estimates()


@dataclass
class MomentTable:
    """Estimates keyed by (N, sims), one column per moment order."""

    rows: dict[tuple[int, int], dict[int, MomentEstimate]]

    @classmethod
    def from_runs(cls, runs: Sequence[EnsembleRun]) -> 'MomentTable':
        rows = {}
        for run in runs:
            rows[(run.spec.N, run.num_samples)] = {
                est.k: est for est in run.estimates()[1:]
            }
        return cls(rows)

    def column(self, k: int) -> list[tuple[int, MomentEstimate]]:
        """(N, estimate) for every row carrying moment k, sorted by N."""
        return sorted(
            ((N, row[k]) for (N, _), row in self.rows.items() if k in row),
            key=lambda item: item[0],
        )

    def fit(
        self, k: int, order: int | None = None, weighted: bool = False
    ) -> ExtrapolationFit:
        column = self.column(k)
        points = [(N, est.mean) for N, est in column]
        weights = None
        if weighted:
            if any(est.stderr <= 0 for _, est in column):
                raise FitError(f"moment {k} has a zero standard error")
            weights = [1.0 / est.stderr**2 for _, est in column]
        return extrapolate(points, order, weights)

    def records(self) -> list[dict]:
        """One record per (N, moment order), in table order."""
        return [
            dict(zip(MOMENT_TABLE_COLUMNS, record))
            for record in self._tuples()
        ]

    def _tuples(self) -> list[tuple]:
        return [
            (N, sims, est.k, est.mean, est.stderr)
            for (N, sims), row in sorted(self.rows.items())
            for _, est in sorted(row.items())
        ]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame.from_records(
            self._tuples(), columns=MOMENT_TABLE_COLUMNS
        )
        return frame.astype(
            {'N': 'int64', 'sims': 'int64', 'moment': 'int64'}
        )


def moment_table(runs: Sequence[EnsembleRun]) -> MomentTable:
    """Moments 1..k_max of every run, keyed by (N, sims)."""
    return MomentTable.from_runs(runs)


def write_moment_table(table: MomentTable, path: Path):
    """CSV `N,sims,moment,mean,stderr` with round-trip float digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_frame().to_csv(path, index=False)


def read_moment_table(path: Path) -> MomentTable:
    frame = pd.read_csv(path, float_precision='round_trip')
    if list(frame.columns) != MOMENT_TABLE_COLUMNS:
        raise ValueError(
            f"{path}: expected header {','.join(MOMENT_TABLE_COLUMNS)}, "
            f"got {','.join(map(str, frame.columns))}"
        )
    rows: dict[tuple[int, int], dict[int, MomentEstimate]] = {}
    for record in frame.itertuples(index=False):
        key = (int(record.N), int(record.sims))
        rows.setdefault(key, {})[int(record.moment)] = MomentEstimate(
            int(record.moment),
            float(record.mean),
            float(record.stderr),
            int(record.sims),
        )
    return MomentTable(rows)


@dataclass(frozen=True)
class OddMomentDecay:
    """|mean| of an odd moment across N with its fitted decay rate."""

    k: int
    sizes: tuple[int, ...]
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    exponent: float | None

    @property
    def within_noise(self) -> tuple[bool, ...]:
        """Mean within three standard errors of zero, per N."""
        return tuple(
            abs(mean) <= 3 * stderr
            for mean, stderr in zip(self.means, self.stderrs)
        )

    def to_dict(self) -> dict:
        return {
            'moment': self.k,
            'N': list(self.sizes),
            'mean': list(self.means),
            'stderr': list(self.stderrs),
            'exponent': self.exponent,
        }


def odd_moment_decay(
    specs: Sequence[EnsembleSpec], num_matrices: int, k: int
) -> OddMomentDecay:
    """Track an odd moment over increasing N."""
    if k % 2 == 0:
        raise ValueError(f"odd moment order expected, got {k}")
    runs = [run_ensemble(spec, num_matrices, k) for spec in specs]
    return odd_moment_report(runs, k)


def odd_moment_report(runs: Sequence[EnsembleRun], k: int) -> OddMomentDecay:
    estimates = [run.estimate(k) for run in runs]
    sizes = tuple(run.spec.N for run in runs)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"N values must increase, got {sizes}")
    means = tuple(est.mean for est in estimates)
    stderrs = tuple(est.stderr for est in estimates)
    # slope only where the mean stands out of the noise
    signal = [
        (N, abs(mean))
        for N, mean, stderr in zip(sizes, means, stderrs)
        if abs(mean) > 3 * stderr
    ]
    exponent = None
    if len(signal) >= 2:
        xs, ys = zip(*signal)
        exponent = float(
            scipy.stats.linregress(np.log(xs), np.log(ys)).slope
        )
    return OddMomentDecay(k, sizes, means, stderrs, exponent)


@dataclass(frozen=True)
class VarianceReport:
    """Spread of the per-matrix k-th moment at each N."""

    k: int
    sizes: tuple[int, ...]
    variances: tuple[float, ...]
    variance_stderrs: tuple[float, ...]
    fourth_central: tuple[float, ...]

    @property
    def decreasing(self) -> tuple[bool, ...]:
        """Consecutive variances decrease, allowing 3-sigma noise."""
        return tuple(
            after - before
            <= 3 * math.hypot(before_err, after_err)
            for before, after, before_err, after_err in zip(
                self.variances,
                self.variances[1:],
                self.variance_stderrs,
                self.variance_stderrs[1:],
            )
        )

    @property
    def strictly_decreasing(self) -> tuple[bool, ...]:
        return tuple(
            after < before
            for before, after in zip(self.variances, self.variances[1:])
        )

    def to_dict(self) -> dict:
        return {
            'moment': self.k,
            'N': list(self.sizes),
            'variance': list(self.variances),
            'variance_stderr': list(self.variance_stderrs),
            'fourth_central': list(self.fourth_central),
            'decreasing': list(self.decreasing),
        }


def _variance_stats(column: np.ndarray) -> tuple[float, float, float]:
    count = len(column)
    centered = column - column.mean()
    variance = float(np.square(centered).sum() / (count - 1))
    fourth = float(np.mean(centered**4))
    # standard error of the unbiased sample variance
    spread = fourth - variance**2 * (count - 3) / (count - 1)
    return variance, math.sqrt(max(spread, 0.0) / count), fourth


def variance_report(runs: Sequence[EnsembleRun], k: int) -> VarianceReport:
    stats = [_variance_stats(run.moments[:, k]) for run in runs]
    return VarianceReport(
        k,
        tuple(run.spec.N for run in runs),
        tuple(s[0] for s in stats),
        tuple(s[1] for s in stats),
        tuple(s[2] for s in stats),
    )


def variance_diagnostic(
    specs: Sequence[EnsembleSpec], num_matrices: int, k: int
) -> VarianceReport:
    """Sample variance of M_k(A) over the ensemble, for each N."""
    if len(specs) < 2:
        raise ValueError("variance diagnostic needs at least two N values")
    runs = [run_ensemble(spec, num_matrices, k) for spec in specs]
    return variance_report(runs, k)


def gaussian_tail(bound: float) -> float:
    """P(Z >= bound) for a standard normal Z."""
    return float(0.5 * scipy.special.erfc(bound / math.sqrt(2.0)))


def tail_mass(pool: np.ndarray, bound: float) -> float:
    """Fraction of pooled normalized eigenvalues at or above bound."""
    pool = np.asarray(pool)
    if not len(pool):
        raise ValueError("empty eigenvalue pool")
    if bound <= 0:
        raise ValueError(f"tail bound must be positive, got {bound}")
    return float(np.count_nonzero(pool >= bound)) / len(pool)


@dataclass(frozen=True)
class TailComparison:
    bound: float
    observed: float
    gaussian: float
    stderr: float

    @property
    def margin(self) -> float:
        """Excess over the Gaussian tail in binomial standard errors."""
        if not self.stderr:
            return math.inf if self.observed > self.gaussian else 0.0
        return (self.observed - self.gaussian) / self.stderr


def tail_comparison(pool: np.ndarray, bound: float) -> TailComparison:
    observed = tail_mass(pool, bound)
    gaussian = gaussian_tail(bound)
    stderr = math.sqrt(gaussian * (1 - gaussian) / len(pool))
    return TailComparison(bound, observed, gaussian, stderr)
