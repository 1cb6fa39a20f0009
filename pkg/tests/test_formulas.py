from fractions import Fraction

import pytest

from palintoep.helper import double_factorial
from palintoep.matchings.formulas import (
    adjacent_core_contribution,
    adjacent_lower_contribution,
    carleman_partial_sum,
    conjectured_moment,
    dpt_adjacent_contribution,
    dpt_adjacent_sum,
    fourth_moment_adjacent,
    fourth_moment_adjacent_from_regions,
    fourth_moment_limit,
    lower_bound_moment,
    upper_bound_moment,
)


@pytest.mark.parametrize(
    'r, expected', [(-1, 1), (0, 1), (1, 1), (5, 15), (6, 48), (9, 945)]
)
def test_double_factorial(r, expected):
    assert double_factorial(r) == expected


def test_double_factorial_range():
    with pytest.raises(ValueError):
        double_factorial(-2)


@pytest.mark.parametrize(
    'm, expected',
    [(2, Fraction(9, 2)), (3, Fraction(75, 2)), (4, Fraction(3465, 8))],
)
def test_conjectured_moments(m, expected):
    assert conjectured_moment(m) == expected


def test_conjectured_tenth_moment():
    assert float(conjectured_moment(5)) == 6260.625


def test_conjectured_moment_needs_two_palindromes():
    with pytest.raises(NotImplementedError):
        conjectured_moment(2, n=2)


@pytest.mark.parametrize(
    'n, expected', [(0, 3), (1, 4.5), (2, 8.25), (3, 16.125)]
)
def test_fourth_moment_limit(n, expected):
    assert fourth_moment_limit(n) == expected


@pytest.mark.parametrize('m, expected', [(2, 1.5), (3, 2.5), (5, 6.625)])
def test_dpt_adjacent(m, expected):
    assert dpt_adjacent_contribution(m) == expected


@pytest.mark.parametrize('m', range(1, 9))
def test_dpt_adjacent_sum_matches_closed_form(m):
    assert dpt_adjacent_sum(m) == dpt_adjacent_contribution(m)


@pytest.mark.parametrize('m', range(1, 9))
def test_lower_contribution_two_palindromes(m):
    assert adjacent_lower_contribution(m, 1) == dpt_adjacent_contribution(m)


@pytest.mark.parametrize('n', range(5))
def test_fourth_moment_forms_agree(n):
    adjacent = fourth_moment_adjacent(n)
    assert fourth_moment_adjacent_from_regions(n) == adjacent
    assert adjacent_lower_contribution(2, n) == adjacent
    assert 3 * adjacent == fourth_moment_limit(n)
    assert lower_bound_moment(2, n, assume_conjecture=True) == (
        fourth_moment_limit(n)
    )


@pytest.mark.parametrize('n', range(1, 4))
@pytest.mark.parametrize('m', range(1, 7))
def test_core_contributions_sum(m, n):
    cores = sum(
        adjacent_core_contribution(m, n, c) for c in range(1, 2**n)
    )
    assert 1 + cores == adjacent_lower_contribution(m, n)


def test_core_constant_range():
    with pytest.raises(ValueError):
        adjacent_core_contribution(2, 1, 2)
    with pytest.raises(ValueError):
        adjacent_core_contribution(2, 1, 0)


@pytest.mark.parametrize(
    'm, n, expected', [(0, 3, 1), (1, 1, 4), (1, 0, 2), (2, 1, 48)]
)
def test_upper_bound(m, n, expected):
    assert upper_bound_moment(m, n) == expected


def test_lower_bounds_two_palindromes():
    assert lower_bound_moment(2, 1, assume_conjecture=True) == 4.5
    assert lower_bound_moment(2, 1, assume_conjecture=False) == 3.5
    assert adjacent_lower_contribution(2, 1) == 1.5


@pytest.mark.parametrize('n', range(4))
@pytest.mark.parametrize('m', range(1, 9))
def test_lower_below_upper(m, n):
    upper = upper_bound_moment(m, n)
    for conjecture in (True, False):
        assert lower_bound_moment(m, n, conjecture) <= upper


@pytest.mark.parametrize('n', [2, 3])
@pytest.mark.parametrize('m', [6, 7, 8])
def test_lower_bound_exceeds_gaussian(m, n):
    gaussian = double_factorial(2 * m - 1)
    assert lower_bound_moment(m, n, assume_conjecture=False) > gaussian
    assert lower_bound_moment(m, n, assume_conjecture=True) > 2 * gaussian


def test_carleman_partial_sums_grow():
    assert carleman_partial_sum(1, 1) == pytest.approx(0.5)
    sums = [carleman_partial_sum(2, m) for m in range(1, 30)]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    with pytest.raises(ValueError):
        carleman_partial_sum(1, 0)


def test_carleman_terms_decay_slowly():
    sums = [0.0] + [carleman_partial_sum(2, m) for m in range(1, 40)]
    for m in range(1, 40):
        assert sums[m] - sums[m - 1] >= 0.3 / m


def test_formula_ranges():
    with pytest.raises(ValueError):
        fourth_moment_limit(-1)
    with pytest.raises(ValueError):
        dpt_adjacent_contribution(0)
    with pytest.raises(ValueError):
        upper_bound_moment(-1, 0)
