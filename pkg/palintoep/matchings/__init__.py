"""Pair matchings and exhaustive moment enumeration

Index tuples (i_1, ..., i_k) of a trace cycle are enumerated exhaustively
in fixed-size chunks; edge e joins i_e and i_{e+1} (cyclically) and carries
the independent entry b_link(i_e, i_{e+1}). Chunks are combined by integer
addition, so any partition of the enumeration gives the same totals.
"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import numpy as np

from palintoep.ensemble import (
    EntryDistribution,
    link_table,
    palindrome_period,
    validate_spec,
)
from palintoep.helper import ENUMERATION_LIMIT, GuardError, double_factorial
from palintoep.helper.logging import LOGGER

# Configuration counts at m <= 2 stay exact up to this dimension.
SMALL_MOMENT_MAX_N = 96
MAX_MATCHING_PAIRS = 6

_CHUNK_CELLS = 2**22


@dataclass(frozen=True)
class PairMatching:
    """Partition of the positions 1..2m into m unordered pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(tuple(sorted(pair)) for pair in self.pairs)
        positions = sorted(p for pair in pairs for p in pair)
        if positions != list(range(1, 2 * len(pairs) + 1)):
            raise ValueError(f"{self.pairs} is not a matching of 1..2m")
        object.__setattr__(self, 'pairs', tuple(sorted(pairs)))

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def size(self) -> int:
        return 2 * len(self.pairs)

    @property
    def is_adjacent(self) -> bool:
        """Every pair joins cyclic neighbours."""
        return all(
            q - p == 1 or (p == 1 and q == self.size) for p, q in self.pairs
        )

    def as_lists(self) -> list[list[int]]:
        return [list(pair) for pair in self.pairs]

    def __str__(self):
        return '{' + ','.join(f"({p},{q})" for p, q in self.pairs) + '}'


def enumerate_pair_matchings(size: int) -> list[PairMatching]:
    """All (size-1)!! matchings, smallest unpaired position first."""
    if size < 2 or size % 2:
        raise ValueError(f"matching size must be even and >= 2, got {size}")
    if size // 2 > MAX_MATCHING_PAIRS:
        raise GuardError(
            f"refusing to enumerate matchings of {size} positions "
            f"(at most {2 * MAX_MATCHING_PAIRS})",
            cost=double_factorial(size - 1),
        )

    def _extend(free: tuple[int, ...]) -> Iterator[tuple]:
        if not free:
            yield ()
            return
        first, rest = free[0], free[1:]
        for idx, partner in enumerate(rest):
            remaining = rest[:idx] + rest[idx + 1 :]
            for tail in _extend(remaining):
                yield ((first, partner),) + tail

    return [
        PairMatching(pairs) for pairs in _extend(tuple(range(1, size + 1)))
    ]


def adjacent_matching(size: int) -> PairMatching:
    """The all-adjacent configuration {(1,2),(3,4),...}."""
    if size < 2 or size % 2:
        raise ValueError(f"matching size must be even and >= 2, got {size}")
    return PairMatching(tuple((p, p + 1) for p in range(1, size, 2)))


def is_negative_constant(constant, period: int):
    """Whether C belongs to the lattice {cP} U {+-(cP - 1)}.

    Those are the constants produced by the negative-sign relation
    i_q - i_{q+1} = -(i_l - i_{l+1}) + C between equal-link diagonals.
    Works elementwise on arrays.
    """
    magnitude = np.abs(constant)
    return (magnitude % period == 0) | ((magnitude + 1) % period == 0)


@dataclass(frozen=True)
class ConstantSet:
    """Constants C matching the diagonal difference delta."""

    delta: int
    N: int
    n: int
    constants: tuple[int, ...]
    positive_constants: tuple[int, ...] = ()

    def __contains__(self, constant: int) -> bool:
        return constant in self.constants


def constant_set(delta: int, N: int, n: int) -> ConstantSet:
    """Enumerate every delta' whose diagonal carries the same entry.

    `constants` holds the C of delta' = -delta + C, `positive_constants`
    the C of delta' = delta + C; only lattice constants are kept.
    """
    validate_spec(n, N)
    if abs(delta) > N - 1:
        raise ValueError(f"|delta| must be <= {N - 1}, got {delta}")
    first_row = link_table(N, n)[0]
    period = palindrome_period(N, n)
    others = np.arange(-(N - 1), N)
    same = others[first_row[np.abs(others)] == first_row[abs(delta)]]

    def _lattice(candidates: np.ndarray) -> tuple[int, ...]:
        kept = candidates[is_negative_constant(candidates, period)]
        return tuple(sorted(set(kept.tolist())))

    return ConstantSet(
        delta, N, n, _lattice(same + delta), _lattice(same - delta)
    )


@dataclass(frozen=True)
class CVector:
    """Constants relating the odd indices of an adjacent configuration."""

    constants: tuple[int, ...]

    @property
    def core(self) -> tuple[int, ...]:
        return tuple(c for c in self.constants if c)

    @property
    def closes(self) -> bool:
        return sum(self.constants) == 0


def c_vector_of(indices: tuple[int, ...]) -> CVector:
    """C_l = i_{2l+1} - i_{2l-1}, read cyclically around the tuple."""
    if len(indices) % 2:
        raise ValueError("C-vectors are defined for even moments")
    odd = indices[::2]
    return CVector(
        tuple(odd[(l + 1) % len(odd)] - odd[l] for l in range(len(odd)))
    )


def _check_cost(N: int, k: int, allow_small: bool = False) -> int:
    cost = N**k
    if cost > ENUMERATION_LIMIT and not allow_small:
        raise GuardError(
            f"exhaustive enumeration of {N}^{k} index tuples exceeds "
            f"{ENUMERATION_LIMIT}",
            cost=cost,
        )
    return cost


def _tuple_chunks(N: int, k: int) -> Iterator[np.ndarray]:
    """Every tuple in {0..N-1}^k, lexicographic, as (rows, k) blocks."""
    total = N**k
    rows = max(1, _CHUNK_CELLS // (k * k))
    radix = N ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, rows):
        flat = np.arange(start, min(start + rows, total), dtype=np.int64)
        yield (flat[:, None] // radix[None, :]) % N


def _edge_links(tuples: np.ndarray, table: np.ndarray) -> np.ndarray:
    return table[tuples, np.roll(tuples, -1, axis=1)]


def _multiplicity_partitions(N: int, n: int, k: int) -> Counter:
    """Tuple counts keyed by the multiplicity pattern of their entries.

    A tuple whose k edges carry distinct entries with multiplicities
    r_1 >= r_2 >= ... is filed under (r_1, r_2, ...).
    """
    table = link_table(N, n)
    census: Counter = Counter()
    base = k + 1
    weights = base ** np.arange(k, dtype=np.int64)
    lower = np.tril(np.ones((k, k), dtype=bool), -1)
    for tuples in _tuple_chunks(N, k):
        links = _edge_links(tuples, table)
        equal = links[:, :, None] == links[:, None, :]
        multiplicity = equal.sum(axis=2)
        first = ~(equal & lower).any(axis=2)
        parts = -np.sort(-np.where(first, multiplicity, 0), axis=1)
        codes, counts = np.unique(parts @ weights, return_counts=True)
        for code, count in zip(codes.tolist(), counts.tolist()):
            census[code] += count
    partitions: Counter = Counter()
    for code, count in census.items():
        digits = []
        for _ in range(k):
            code, digit = divmod(code, base)
            if digit:
                digits.append(digit)
        partitions[tuple(digits)] += count
    return partitions


def _weighted_total(
    partitions: Counter, distribution: EntryDistribution
) -> Fraction:
    total = Fraction(0)
    for parts, count in partitions.items():
        weight = Fraction(1)
        for r in parts:
            weight *= Fraction(distribution.moment(r))
        total += count * weight
    return total


def exact_expected_moment(
    N: int, n: int, k: int, distribution: EntryDistribution | None = None
) -> float:
    """Exact ensemble average M_{k,n;N} by enumerating all N^k tuples."""
    validate_spec(n, N)
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    distribution = distribution or EntryDistribution()
    if k == 0:
        return 1.0
    _check_cost(N, k)
    LOGGER.info(f"Enumerating {N}^{k} tuples for n={n}...")
    total = _weighted_total(
        _multiplicity_partitions(N, n, k), distribution
    )
    if k % 2 == 0:
        return float(total / N ** (k // 2 + 1))
    return float(total) / N ** (k / 2 + 1)


@dataclass(frozen=True)
class MomentDecomposition:
    """Exact even moment split into its pair-exact part and the rest."""

    N: int
    n: int
    k: int
    pair_exact_count: int
    pair_exact: Fraction
    residual: Fraction

    @property
    def total(self) -> Fraction:
        return self.pair_exact + self.residual


def moment_decomposition(
    N: int, n: int, k: int, distribution: EntryDistribution | None = None
) -> MomentDecomposition:
    """Split M_{k,n;N} over tuples matched exactly in pairs and the rest.

    Each pair-exact tuple belongs to exactly one matching, so
    pair_exact_count equals the sum of configuration counts.
    """
    validate_spec(n, N)
    if k < 2 or k % 2:
        raise ValueError(f"decomposition needs an even order >= 2, got {k}")
    distribution = distribution or EntryDistribution()
    _check_cost(N, k)
    partitions = _multiplicity_partitions(N, n, k)
    pairs_only = (2,) * (k // 2)
    pair_count = partitions.pop(pairs_only, 0)
    scale = N ** (k // 2 + 1)
    pair_weight = Fraction(distribution.moment(2)) ** (k // 2)
    return MomentDecomposition(
        N,
        n,
        k,
        pair_count,
        pair_count * pair_weight / scale,
        _weighted_total(partitions, distribution) / scale,
    )


@dataclass(frozen=True)
class OffsetFilter:
    """Keep tuples with k = i + c N/2^n (or one less when crossing)."""

    c: int
    crossing: bool = False

    def offset(self, N: int, n: int) -> int:
        return self.c * palindrome_period(N, n) - int(self.crossing)


@dataclass
class ConfigurationReport:
    """Exact tuple count of one matching at one dimension."""

    N: int
    n: int
    matching: PairMatching
    count: int
    positive_sign_count: int
    offset_filter: OffsetFilter | None = None
    shared_count: int = 0

    @property
    def m(self) -> int:
        return self.matching.m

    @property
    def contribution(self) -> float:
        return self.count / self.N ** (self.m + 1)

    @property
    def relation_count(self) -> int:
        """Tuples meeting the pair equalities, shared links included."""
        return self.count + self.shared_count

    @property
    def relation_contribution(self) -> float:
        return self.relation_count / self.N ** (self.m + 1)

    @property
    def negative_sign_count(self) -> int:
        return self.count - self.positive_sign_count

    def to_dict(self) -> dict:
        document = {
            'matching': self.matching.as_lists(),
            'N': self.N,
            'n': self.n,
            'm': self.m,
            'count': self.count,
            'contribution': self.contribution,
            'positive_sign_count': self.positive_sign_count,
            'shared_count': self.shared_count,
            'relation_contribution': self.relation_contribution,
        }
        if self.offset_filter is not None:
            document['offset_filter'] = {
                'c': self.offset_filter.c,
                'crossing': self.offset_filter.crossing,
            }
        return document


def configuration_contribution(
    N: int,
    n: int,
    matching: PairMatching,
    offset_filter: OffsetFilter | None = None,
) -> ConfigurationReport:
    """Count tuples realizing `matching` exactly.

    Edges paired by the matching carry equal entries and distinct pairs
    carry distinct entries. Tuples meeting the pair equalities with two
    pairs on one link are tallied in `shared_count` instead. Each counted
    tuple is classified by whether every pair resolves with the negative
    sign. With `offset_filter`, only tuples whose first pair (p, q)
    satisfies i_{q+1} = i_p + offset count.
    """
    validate_spec(n, N)
    size, m = matching.size, matching.m
    _check_cost(N, size, allow_small=m <= 2 and N <= SMALL_MOMENT_MAX_N)
    LOGGER.debug(f"Counting configuration {matching} at N={N}, n={n}")

    table = link_table(N, n)
    period = palindrome_period(N, n)
    left = np.array([p - 1 for p, _ in matching.pairs])
    right = np.array([q - 1 for _, q in matching.pairs])
    offset = offset_filter.offset(N, n) if offset_filter else None
    anchor, target = left[0], (right[0] + 1) % size

    count = positive = shared = 0
    for tuples in _tuple_chunks(N, size):
        if offset is not None:
            tuples = tuples[tuples[:, target] - tuples[:, anchor] == offset]
            if not len(tuples):
                continue
        links = _edge_links(tuples, table)
        related = (links[:, left] == links[:, right]).all(axis=1)
        keep = related.copy()
        for a, b in combinations(range(m), 2):
            keep &= links[:, left[a]] != links[:, left[b]]
        diffs = tuples - np.roll(tuples, -1, axis=1)
        negative = is_negative_constant(
            diffs[:, left] + diffs[:, right], period
        ).all(axis=1)
        count += int(keep.sum())
        shared += int((related & ~keep).sum())
        positive += int((keep & ~negative).sum())
    return ConfigurationReport(
        N, n, matching, count, positive, offset_filter, shared
    )


@dataclass(frozen=True)
class RegionCounts:
    """Adjacent fourth-moment tuples with k = i + cN/2^n (- 1)."""

    N: int
    n: int
    c: int
    no_cross: int
    cross: int

    @property
    def no_cross_fraction(self) -> float:
        return self.no_cross / self.N**3

    @property
    def cross_fraction(self) -> float:
        return self.cross / self.N**3


def adjacent_region_counts(N: int, n: int, c: int) -> RegionCounts:
    """Region counts of the adjacent fourth-moment configuration."""
    validate_spec(n, N)
    if not 0 <= c <= 2**n - 1:
        raise ValueError(f"c must lie in 0..{2**n - 1}, got {c}")
    LOGGER.info(f"Counting adjacent regions N={N}, n={n}, c={c}...")
    matching = adjacent_matching(4)
    no_cross = configuration_contribution(
        N, n, matching, OffsetFilter(c, crossing=False)
    )
    cross = configuration_contribution(
        N, n, matching, OffsetFilter(c, crossing=True)
    )
    return RegionCounts(N, n, c, no_cross.count, cross.count)
