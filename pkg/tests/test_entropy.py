"""Entropy inequalities and the Herbst chain."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submeasure_lab.algebra import Cover, GroundSet
from submeasure_lab.entropy import (
    FiniteDist,
    ProductDist,
    combinations_cover,
    conditional_entropy_integral,
    ent,
    herbst_chain_check,
    ledoux_check,
    random_ledoux_suite,
    random_shearer_suite,
    shearer_check,
    tail_bound,
    uniform_covers,
)
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError, NonUniformCoverError
from submeasure_lab.utils import spawn_rng


def _fair_bits(n_coords: int) -> ProductDist:
    return ProductDist(tuple(FiniteDist.uniform(2) for _ in range(n_coords)))


def test_entropy_of_constants_and_indicators():
    mu = FiniteDist.uniform(4)
    assert ent(np.full(4, 3.0), mu) == pytest.approx(0.0, abs=1e-12)
    # indicator of half the space: Ent = log 2 / 2
    assert ent(np.array([1.0, 1.0, 0.0, 0.0]), mu) == pytest.approx(math.log(2) / 2)
    assert ent(np.zeros(4), mu) == 0.0
    with pytest.raises(InvalidInputError):
        ent(np.array([-1.0, 1.0, 1.0, 1.0]), mu)


def test_distribution_validation():
    with pytest.raises(InvalidInputError):
        FiniteDist(np.array([0.5, 0.6]))
    with pytest.raises(InvalidInputError):
        FiniteDist.from_weights([0, 0])
    assert FiniteDist.from_weights([1, 3]).probabilities.tolist() == [0.25, 0.75]


def test_conditional_integral_over_everything_is_entropy():
    rng = spawn_rng(1, 0)
    dist = ProductDist(tuple(FiniteDist.random(3, rng) for _ in range(3)))
    values = rng.random(dist.shape)
    assert conditional_entropy_integral(values, dist, [0, 1, 2]) == pytest.approx(ent(values, dist))
    assert conditional_entropy_integral(values, dist, []) == 0.0


def test_han_cover_on_three_bits():
    rng = spawn_rng(2, 0)
    values = rng.random((2, 2, 2)) + 0.1
    result = shearer_check(values, _fair_bits(3), combinations_cover(3, 2), k=2)
    assert result.holds
    assert result.rhs >= result.lhs - 1e-12


def test_shearer_rejects_non_uniform_cover():
    ground = GroundSet(3)
    lopsided = Cover.from_indices(ground, [[0, 1], [1, 2]])
    with pytest.raises(NonUniformCoverError):
        shearer_check(np.ones((2, 2, 2)), _fair_bits(3), lopsided)
    with pytest.raises(InvalidInputError):
        shearer_check(np.ones((2, 2, 2)), _fair_bits(3), combinations_cover(3, 2), k=1)


def test_uniform_covers_enumeration():
    covers = list(uniform_covers(2))
    # {0,1}; {0},{1}; {0},{1},{0,1}
    assert len(covers) == 3
    with pytest.raises(LimitExceededError):
        next(uniform_covers(5))


def test_random_suites_find_no_violations():
    shearer = random_shearer_suite(3, 2, instances=20, seed=5)
    assert shearer.violations == 0
    assert shearer.checks > 20
    ledoux = random_ledoux_suite(points=8, instances=500, seed=5)
    assert ledoux.violations == 0
    assert ledoux.min_slack >= -1e-9


@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=2, max_size=8), st.integers(0, 2**32))
@settings(max_examples=100, deadline=None)
def test_ledoux_inequality(values, seed):
    mu = FiniteDist.random(len(values), spawn_rng(seed, 0))
    assert ledoux_check(np.array(values), mu).holds


def test_herbst_chain_on_a_bit():
    # f = x on a fair bit has Ent(e^{lam f}) <= lam^2/8 E e^{lam f}, so D = 1/4 works
    report = herbst_chain_check(
        np.array([0.0, 1.0]), np.array([0.5, 0.5]), 0.25, [0.5, 1.0, 2.0], [0.25, 0.5]
    )
    assert report.mean == pytest.approx(0.5)
    assert report.failures == 0
    assert all(row.jensen for row in report.lambda_rows)
    assert all(row.conclusion for row in report.lambda_rows)
    assert report.to_json()["failures"] == 0


def test_herbst_rejects_bad_parameters():
    with pytest.raises(InvalidInputError):
        herbst_chain_check(np.zeros(2), np.array([0.5, 0.5]), 0.0, [1.0], [1.0])
    with pytest.raises(InvalidInputError):
        herbst_chain_check(np.zeros(2), np.array([0.5, 0.5]), 1.0, [-1.0], [1.0])


def test_tail_bound():
    bound = tail_bound(1, [0.01] * 100, 0.2)
    assert bound.lipschitz == pytest.approx(math.exp(-1))
    assert bound.concentration == pytest.approx(math.exp(-0.5))
    assert tail_bound(2, [0.0], 1.0).trivial
    with pytest.raises(InvalidInputError):
        tail_bound(0, [1.0], 1.0)
