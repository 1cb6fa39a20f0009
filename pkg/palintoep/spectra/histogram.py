"""Density display of the normalized spectral measure"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

DEFAULT_BINS = 120
DEFAULT_RANGE = (-6.0, 6.0)


@dataclass(frozen=True)
class Histogram:
    """Uniform bins; masses are fractions of all samples."""

    edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def masses(self) -> np.ndarray:
        if not self.total:
            return np.zeros(len(self.counts))
        return self.counts / self.total

    @property
    def out_of_range(self) -> float:
        """Mass falling outside [edges[0], edges[-1]]."""
        if not self.total:
            return 0.0
        return 1.0 - float(self.counts.sum()) / self.total

    def merge(self, other: 'Histogram') -> 'Histogram':
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different bins")
        return Histogram(
            self.edges, self.counts + other.counts, self.total + other.total
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                'bin_left': self.edges[:-1],
                'bin_right': self.edges[1:],
                'mass': self.masses,
            }
        )


def histogram(
    values: np.ndarray,
    bins: int = DEFAULT_BINS,
    value_range: tuple[float, float] = DEFAULT_RANGE,
) -> Histogram:
    """Bin normalized eigenvalues.

    Bins are left-closed and right-open except the last one, which is
    closed on both sides.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    low, high = value_range
    if not low < high:
        raise ValueError(f"empty range [{low}, {high}]")
    values = np.asarray(values, dtype=np.float64).ravel()
    counts, edges = np.histogram(values, bins=bins, range=(low, high))
    return Histogram(edges, counts.astype(np.int64), len(values))


def write_histogram(hist: Histogram, path: Path):
    """CSV with header bin_left,bin_right,mass."""
    path.parent.mkdir(parents=True, exist_ok=True)
    hist.to_frame().to_csv(path, index=False, float_format=None)
