"""Highly palindromic real symmetric Toeplitz matrices"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from palintoep.ensemble.distribution import (
    DISTRIBUTIONS,
    DistributionKind,
    EntryDistribution,
    get_distribution,
)
from palintoep.helper import DimensionError

__all__ = [
    'DISTRIBUTIONS',
    'DistributionKind',
    'EnsembleSpec',
    'EntryDistribution',
    'EntryVector',
    'PalindromicMatrix',
    'build_matrix',
    'get_distribution',
    'link_index',
    'link_table',
    'palindrome_period',
    'sample_entries',
    'sample_entry_block',
    'validate_spec',
]

_SEED_MASK = (1 << 64) - 1


def validate_spec(n: int, N: int):
    """Check that N splits into 2^n palindromes of even length."""
    if n < 0:
        raise DimensionError(f"palindromicity n must be >= 0, got {n}")
    block = 2 ** (n + 1)
    if N < block or N % block:
        raise DimensionError(
            f"N must be a multiple of {block} (2^(n+1) with n={n}), got {N}"
        )


def palindrome_period(N: int, n: int) -> int:
    """Length P = N / 2^n of one palindrome in the first row."""
    return N >> n


def link_index(i: int, j: int, N: int, n: int) -> int:
    """Index of the independent entry sitting at (i, j), 1-based."""
    validate_spec(n, N)
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"({i}, {j}) outside a {N}x{N} matrix")
    period = palindrome_period(N, n)
    d = abs(i - j) % period
    return d if d < period // 2 else period - 1 - d


@lru_cache(maxsize=64)
def link_table(N: int, n: int) -> np.ndarray:
    """N x N table of link indices (0-based rows and columns)."""
    validate_spec(n, N)
    period = palindrome_period(N, n)
    idx = np.arange(N)
    d = np.abs(idx[:, None] - idx[None, :]) % period
    table = np.where(d < period // 2, d, period - 1 - d)
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class EnsembleSpec:
    """One ensemble member family: (n, N, distribution, seed)."""

    n: int
    N: int
    distribution: EntryDistribution = field(
        default_factory=EntryDistribution
    )
    seed: int = 0

    def __post_init__(self):
        validate_spec(self.n, self.N)
        if not 0 <= self.seed <= _SEED_MASK:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")

    @property
    def num_entries(self) -> int:
        """N / 2^(n+1) independent entries."""
        return self.N >> (self.n + 1)

    @property
    def period(self) -> int:
        return palindrome_period(self.N, self.n)


@dataclass(frozen=True)
class EntryVector:
    """Independent entries b_0 ... b_{N/2^(n+1) - 1}."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class PalindromicMatrix:
    """Dense symmetric matrix with a_ij = b_link(i,j)."""

    spec: EnsembleSpec
    entries: EntryVector
    dense: np.ndarray

    @property
    def N(self) -> int:
        return self.spec.N

    @property
    def first_row(self) -> np.ndarray:
        return self.dense[0]


def _generator(seed: int, sample_index: int) -> np.random.Generator:
    # counter-based stream: child `sample_index` of the run's seed sequence
    sequence = np.random.SeedSequence(seed, spawn_key=(sample_index,))
    return np.random.default_rng(sequence)


def sample_entries(spec: EnsembleSpec, sample_index: int) -> EntryVector:
    """Draw the entry vector of sample `sample_index`.

    The stream depends only on (spec.seed, sample_index), so samples can be
    produced in any order and on any worker.
    """
    rng = _generator(spec.seed, sample_index)
    return EntryVector(spec.distribution.draw(rng, spec.num_entries))


def sample_entry_block(
    spec: EnsembleSpec, start: int, stop: int
) -> np.ndarray:
    """Entry vectors of samples start..stop-1 stacked row-wise."""
    block = np.empty((stop - start, spec.num_entries), dtype=np.float64)
    for row, sample_index in enumerate(range(start, stop)):
        rng = _generator(spec.seed, sample_index)
        block[row] = spec.distribution.draw(rng, spec.num_entries)
    return block


def build_matrix(
    spec: EnsembleSpec, entries: EntryVector
) -> PalindromicMatrix:
    """Materialize the dense matrix of one ensemble member."""
    if len(entries) != spec.num_entries:
        raise DimensionError(
            f"expected {spec.num_entries} entries for n={spec.n}, "
            f"N={spec.N}, got {len(entries)}"
        )
    dense = entries.values[link_table(spec.N, spec.n)]
    dense.flags.writeable = False
    return PalindromicMatrix(spec, entries, dense)
