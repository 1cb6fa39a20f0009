from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from palintoep.ensemble import EnsembleSpec, get_distribution
from palintoep.estimation import run_ensemble
from palintoep.helper import GuardError, double_factorial
from palintoep.matchings import (
    OffsetFilter,
    PairMatching,
    adjacent_matching,
    adjacent_region_counts,
    c_vector_of,
    configuration_contribution,
    constant_set,
    enumerate_pair_matchings,
    exact_expected_moment,
    moment_decomposition,
)

CROSSING = PairMatching(((1, 3), (2, 4)))
NESTED = PairMatching(((1, 4), (2, 3)))


def test_enumerate_small():
    assert enumerate_pair_matchings(2) == [PairMatching(((1, 2),))]
    assert [str(m) for m in enumerate_pair_matchings(4)] == [
        '{(1,2),(3,4)}',
        '{(1,3),(2,4)}',
        '{(1,4),(2,3)}',
    ]


@pytest.mark.parametrize('size', [2, 4, 6, 8])
def test_enumerate_counts(size):
    matchings = enumerate_pair_matchings(size)
    assert len(matchings) == double_factorial(size - 1)
    assert len(set(matchings)) == len(matchings)


def test_enumerate_guard():
    with pytest.raises(GuardError):
        enumerate_pair_matchings(14)
    with pytest.raises(ValueError):
        enumerate_pair_matchings(5)


def test_pair_matching_validation():
    assert PairMatching(((4, 3), (2, 1))) == adjacent_matching(4)
    with pytest.raises(ValueError):
        PairMatching(((1, 2), (2, 3)))


def test_adjacency():
    assert adjacent_matching(6).is_adjacent
    assert NESTED.is_adjacent
    assert not CROSSING.is_adjacent
    assert sum(m.is_adjacent for m in enumerate_pair_matchings(6)) == 2


def test_constant_set_single_palindrome():
    assert 0 in constant_set(0, 8, 0)
    assert constant_set(0, 8, 0).constants == (-7, 0, 7)
    assert constant_set(1, 8, 0).constants == (0, 7)


def test_constant_set_two_palindromes():
    constants = constant_set(1, 8, 1).constants
    assert constants == (-4, 0, 3, 7)
    assert all(abs(c) < 2 * 8 for c in constants)


def test_positive_constants():
    assert constant_set(0, 8, 0).positive_constants == (-7, 0, 7)
    assert constant_set(1, 8, 0).positive_constants == (-7, 0)
    assert constant_set(1, 8, 1).positive_constants == (-7, -3, 0, 4)


def test_constant_set_keeps_lattice_only():
    # delta' + delta over every equal diagonal is {-5, 0, 2, 7}
    constants = constant_set(1, 8, 0)
    assert 2 not in constants
    assert -5 not in constants


def test_constant_set_range():
    with pytest.raises(ValueError):
        constant_set(8, 8, 1)


def test_c_vector_closes():
    vector = c_vector_of((1, 4, 9, 2, 5, 7))
    assert vector.constants == (8, -4, -4)
    assert vector.closes
    assert c_vector_of((3, 1, 3, 0)).core == ()


@pytest.mark.parametrize('n, N', [(0, 4), (0, 6), (1, 8), (2, 16)])
def test_second_moment_is_one(n, N):
    assert exact_expected_moment(N, n, 2) == 1.0


@pytest.mark.parametrize('name', ['gaussian', 'rademacher', 'uniform'])
@pytest.mark.parametrize('k', [1, 3, 5])
def test_odd_moments_vanish(name, k):
    distribution = get_distribution(name)
    assert exact_expected_moment(8, 1, k, distribution) == 0.0


def test_fourth_moment_two_palindromes():
    # E tr A^4 = 4384 for the 8 x 8 doubly palindromic ensemble
    assert exact_expected_moment(8, 1, 4) == 8.5625
    assert exact_expected_moment(
        8, 1, 4, get_distribution('rademacher')
    ) == 5.5


def test_moment_zero():
    assert exact_expected_moment(8, 1, 0) == 1.0


def test_exact_moment_guard():
    with pytest.raises(GuardError) as info:
        exact_expected_moment(64, 1, 6)
    assert info.value.cost == 64**6


def test_configuration_counts_two_palindromes():
    counts = [
        configuration_contribution(8, 1, m).count
        for m in enumerate_pair_matchings(4)
    ]
    assert counts == [688, 656, 688]


def test_shared_links_are_reported():
    # 4384 = 2032 pair-exact tuples + 3 * 784 tuples on a single link
    for matching in enumerate_pair_matchings(4):
        report = configuration_contribution(8, 1, matching)
        assert report.shared_count == 784
        assert report.relation_count == report.count + 784
        assert report.to_dict()['shared_count'] == 784


@pytest.mark.parametrize('n, N', [(1, 8), (0, 16), (1, 16)])
def test_shared_links_carry_the_residual(n, N):
    report = configuration_contribution(N, n, adjacent_matching(4))
    decomposition = moment_decomposition(N, n, 4)
    assert decomposition.residual == Fraction(3 * report.shared_count, N**3)


@pytest.mark.parametrize('n, N', [(1, 8), (0, 16), (1, 16), (2, 16)])
def test_decomposition_reconciles(n, N):
    decomposition = moment_decomposition(N, n, 4)
    configurations = sum(
        configuration_contribution(N, n, m).count
        for m in enumerate_pair_matchings(4)
    )
    assert decomposition.pair_exact_count == configurations
    exact = exact_expected_moment(N, n, 4)
    assert float(decomposition.total) == pytest.approx(exact, rel=1e-15)
    assert isinstance(decomposition.total, Fraction)


def test_decomposition_needs_even_order():
    with pytest.raises(ValueError):
        moment_decomposition(8, 1, 3)


@pytest.mark.parametrize('N', [8, 16, 32])
def test_configurations_approach_limit(N):
    for matching in enumerate_pair_matchings(4):
        report = configuration_contribution(N, 1, matching)
        assert abs(report.contribution - 1.5) < 4 / N
        assert 0 <= report.positive_sign_count <= report.count
        assert (
            report.negative_sign_count + report.positive_sign_count
            == report.count
        )


def test_single_palindrome_adjacent_contribution():
    report = configuration_contribution(16, 0, adjacent_matching(4))
    assert abs(report.contribution - 1.0) < 4 / 16


def test_positive_signs_shrink():
    fractions = [
        configuration_contribution(N, 1, adjacent_matching(4))
        for N in (8, 16, 32)
    ]
    ratios = [r.positive_sign_count / r.N**3 for r in fractions]
    assert ratios[2] < ratios[1] < ratios[0]


def test_configuration_report_document():
    report = configuration_contribution(
        8, 1, adjacent_matching(4), OffsetFilter(1)
    )
    document = report.to_dict()
    assert document['matching'] == [[1, 2], [3, 4]]
    assert document['m'] == 2
    assert document['offset_filter'] == {'c': 1, 'crossing': False}
    assert document['contribution'] == report.count / 8**3


def test_configuration_guard():
    with pytest.raises(GuardError):
        configuration_contribution(16, 1, adjacent_matching(12))


@pytest.mark.parametrize('N', [16, 32])
def test_region_counts(N):
    regions = adjacent_region_counts(N, 1, 1)
    assert abs(regions.no_cross_fraction - 1 / 8) < 4 / N
    assert abs(regions.cross_fraction - 1 / 8) < 4 / N


def test_region_counts_zero_constant():
    N = 16
    regions = adjacent_region_counts(N, 1, 0)
    assert 1 - 8 / N <= regions.no_cross_fraction <= 1


def test_region_counts_range():
    with pytest.raises(ValueError):
        adjacent_region_counts(16, 1, 2)


@pytest.mark.slow
def test_monte_carlo_reconciles_with_enumeration():
    spec = EnsembleSpec(1, 8, seed=2)
    estimate = run_ensemble(spec, 10**6, 4).estimate(4)
    exact = exact_expected_moment(8, 1, 4)
    assert abs(estimate.mean - exact) <= 3 * estimate.stderr


@pytest.mark.slow
@pytest.mark.parametrize('matching', [adjacent_matching(4), CROSSING])
def test_fourth_moment_defect_halves(matching):
    defects = [
        abs(
            configuration_contribution(N, 1, matching).relation_contribution
            - 1.5
        )
        for N in (16, 32, 64)
    ]
    for before, after in zip(defects, defects[1:]):
        assert 0.3 <= after / before <= 0.7


@pytest.mark.slow
def test_positive_sign_rate():
    sizes = (16, 32, 64)
    ratios = [
        configuration_contribution(
            N, 1, adjacent_matching(4)
        ).positive_sign_count
        / N**3
        for N in sizes
    ]
    slope = scipy.stats.linregress(np.log(sizes), np.log(ratios)).slope
    assert slope <= -0.8


@pytest.mark.slow
def test_region_counts_sixty_four():
    regions = adjacent_region_counts(64, 1, 1)
    assert abs(regions.no_cross_fraction - 1 / 8) < 4 / 64
    assert abs(regions.cross_fraction - 1 / 8) < 4 / 64


@pytest.mark.slow
def test_sixth_moment_configurations_single_palindrome():
    for matching in enumerate_pair_matchings(6):
        report = configuration_contribution(24, 0, matching)
        assert abs(report.contribution - 1.0) < 0.5
