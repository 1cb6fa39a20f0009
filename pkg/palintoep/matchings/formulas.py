"""Closed-form moment catalog

Everything is evaluated with Fractions, so identities between the
different forms hold exactly.
"""

import math
from fractions import Fraction

from palintoep.helper import double_factorial


def fourth_moment_limit(n: int) -> Fraction:
    """M_{4,n} = 2^(n+1) + 2^-n."""
    _check_n(n)
    return 2 ** (n + 1) + Fraction(1, 2**n)


def fourth_moment_adjacent(n: int) -> Fraction:
    """Limit contribution of one adjacent fourth-moment configuration."""
    _check_n(n)
    return Fraction(2, 3) * 2**n + Fraction(1, 3) / 2**n


def fourth_moment_adjacent_from_regions(n: int) -> Fraction:
    """Same contribution, summed from the region areas of each c.

    The zero constant contributes 1; each c in 1..2^n and its negative
    contribute ((2^n - c)/2^n)^3 (no crossing) + (2^n c^2 - c^3)/2^(3n)
    (crossing).
    """
    _check_n(n)
    q = 2**n
    regions = sum(
        Fraction((q - c) ** 3 + q * c**2 - c**3, q**3)
        for c in range(1, q + 1)
    )
    return 1 + 2 * regions


def dpt_adjacent_contribution(m: int) -> Fraction:
    """Adjacent 2m-th moment contribution for two palindromes (n = 1)."""
    _check_m(m)
    return -2 + Fraction(1 + 2**m + 3**m, 2**m)


def dpt_adjacent_sum(m: int) -> Fraction:
    """The same contribution before the binomial theorem is applied.

    Zero C-vector (1) plus four core families, each built from an
    even-length core of +-N/2 or +-(N/2 - 1) with binom(m, k) placements.
    """
    _check_m(m)
    families = sum(
        math.comb(m, k) * Fraction(1, 2 ** (k + 1))
        for k in range(2, m + 1, 2)
    )
    return 1 + 4 * families


def adjacent_core_contribution(m: int, n: int, c: int) -> Fraction:
    """Cores on +-cN/2^n and their complements N - 1 - cN/2^n."""
    _check_m(m)
    _check_n(n)
    if not 1 <= c <= 2**n - 1:
        raise ValueError(f"c must lie in 1..{2**n - 1}, got {c}")
    ratio = Fraction(c, 2**n)
    return -2 + (2 - ratio) ** m + ratio**m


def adjacent_lower_contribution(m: int, n: int) -> Fraction:
    """-2 (2^n - 1) + 2^(-mn) sum_{c=1}^{2^(n+1)-1} c^m."""
    _check_m(m)
    _check_n(n)
    powers = sum(c**m for c in range(1, 2 ** (n + 1)))
    return -2 * (2**n - 1) + Fraction(powers, 2 ** (m * n))


def upper_bound_moment(m: int, n: int) -> int:
    """(2 2^n)^m (2m-1)!!, which satisfies Carleman's condition."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    _check_n(n)
    return (2 * 2**n) ** m * double_factorial(2 * m - 1)


def lower_bound_moment(m: int, n: int, assume_conjecture: bool) -> Fraction:
    """Lower bound on M_{2m,n}.

    Assuming every configuration contributes like the adjacent one, the
    adjacent value times (2m-1)!!; otherwise the adjacent value plus 1 for
    each of the other (2m-1)!! - 1 configurations.
    """
    adjacent = adjacent_lower_contribution(m, n)
    matchings = double_factorial(2 * m - 1)
    if assume_conjecture:
        return adjacent * matchings
    return adjacent + matchings - 1


def conjectured_moment(m: int, n: int = 1) -> Fraction:
    """(2m-1)!! times the adjacent contribution; closed form for n = 1."""
    if n != 1:
        raise NotImplementedError(
            f"closed-form moments are known for n = 1 only, got n={n}"
        )
    return double_factorial(2 * m - 1) * dpt_adjacent_contribution(m)


def carleman_partial_sum(n: int, m_max: int) -> float:
    """sum_{m=1}^{m_max} U_{2m}^(-1/2m) over the upper-bound moments."""
    if m_max < 1:
        raise ValueError(f"m_max must be >= 1, got {m_max}")
    return math.fsum(
        math.exp(-math.log(upper_bound_moment(m, n)) / (2 * m))
        for m in range(1, m_max + 1)
    )


def _check_m(m: int):
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


def _check_n(n: int):
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
