"""Cover and block pseudo-metrics."""
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submeasure_lab.algebra import AtomSet, Cover, GroundSet, Partition
from submeasure_lab.exceptions import InfeasibleCoverError, InvalidInputError
from submeasure_lab.metric import (
    BlockMetric,
    CoverMetric,
    ProductPoint,
    difference_masks,
    difference_set,
    dist_blocks,
    dist_cover,
    normalized_hamming,
    pairwise_within,
)
from submeasure_lab.submeasure import WeightedCoverFamily, make_cover_generated, make_measure

from .strategies import point_pairs, weighted_covers


def test_difference_set_and_hamming():
    assert difference_set([0, 1, 2], [0, 2, 2]) == 0b010
    assert normalized_hamming([0, 1, 2, 3], [1, 1, 2, 0]) == Fraction(1, 2)
    with pytest.raises(InvalidInputError):
        difference_set([0, 1], [0, 1, 2])


def test_product_point_validation():
    assert len(ProductPoint((0, 1), (2, 2))) == 2
    with pytest.raises(InvalidInputError):
        ProductPoint((0, 2), (2, 2))


def test_singleton_cover_gives_normalized_hamming():
    ground = GroundSet(4)
    cover = Cover.from_indices(ground, [[j] for j in range(4)], [Fraction(1, 4)] * 4)
    metric = CoverMetric(cover)
    x, y = [0, 1, 1, 0], [1, 1, 0, 0]
    assert metric(x, y) == normalized_hamming(x, y) == dist_cover(x, y, cover)


@pytest.mark.parametrize("n_coords", range(1, 13))
def test_singletons_give_normalized_hamming_everywhere(n_coords):
    phi = make_measure([Fraction(1, n_coords)] * n_coords)
    singletons = Partition.singletons(phi.ground)
    cover_metric = CoverMetric(singletons.as_cover([Fraction(1, n_coords)] * n_coords))
    block_metric = BlockMetric(phi, singletons)
    origin = [0] * n_coords
    for mask in range(1 << n_coords):
        y = [mask >> j & 1 for j in range(n_coords)]
        expected = Fraction(mask.bit_count(), n_coords)
        assert normalized_hamming(origin, y) == expected
        assert cover_metric(origin, y) == expected
        assert block_metric(origin, y) == expected


def test_overlapping_cover_picks_cheapest_entries():
    ground = GroundSet(3)
    cover = Cover.from_indices(ground, [[0, 1], [1, 2], [0], [2]], [1, 1, Fraction(1, 4), Fraction(1, 4)])
    assert dist_cover([0, 0, 0], [1, 0, 1], cover) == Fraction(1, 2)
    assert dist_cover([0, 0, 0], [1, 1, 0], cover) == 1
    assert CoverMetric(cover, exact=False)([0, 0, 0], [1, 1, 1]) == 1.25


def test_cover_missing_a_coordinate():
    ground = GroundSet(3)
    cover = Cover.from_indices(ground, [[0, 1]], [1])
    assert dist_cover([0, 0, 0], [1, 0, 0], cover) == 1
    with pytest.raises(InfeasibleCoverError):
        dist_cover([0, 0, 0], [0, 0, 1], cover)


@given(st.data(), weighted_covers(max_atoms=5))
@settings(max_examples=100, deadline=None)
def test_cover_metric_is_a_pseudo_metric(data, cover):
    n_coords = cover.ground.n_atoms
    metric = CoverMetric(cover)
    x, y = data.draw(point_pairs(n_coords))
    z, _ = data.draw(point_pairs(n_coords))
    assert metric(x, x) == 0
    assert metric(x, y) == metric(y, x) >= 0
    assert metric(x, z) <= metric(x, y) + metric(y, z)


def test_block_metric_is_phi_of_differing_blocks():
    phi = make_measure([Fraction(1, 6)] * 6)
    blocks = Partition.from_indices(phi.ground, [[0, 1], [2, 3, 4], [5]])
    metric = BlockMetric(phi, blocks)
    assert metric([0, 1, 0], [1, 1, 1]) == Fraction(1, 2)
    assert dist_blocks([0, 0, 0], [0, 1, 0], phi, blocks) == Fraction(1, 2)
    with pytest.raises(InvalidInputError):
        metric([0, 1], [1, 1])


def test_block_metric_dominated_by_its_cover():
    phi = make_measure([Fraction(1, 4)] * 4)
    blocks = Partition.from_indices(phi.ground, [[0], [1, 2], [3]])
    metric = BlockMetric(phi, blocks)
    dominating = CoverMetric(metric.dominating_cover())
    for mask in range(8):
        assert metric.by_mask(mask) <= dominating.by_mask(mask)


def test_pairwise_within():
    points = np.array([[0, 0], [0, 1], [1, 1]])
    close = pairwise_within(points, normalized_hamming, Fraction(1, 2))
    assert close.tolist() == [[True, False, False], [False, True, False], [False, False, True]]
    masks = difference_masks(points)
    assert masks[0, 2] == 0b11


def _random_cover(rng, n_coords):
    full = (1 << n_coords) - 1
    masks = [int(mask) for mask in rng.integers(1, full + 1, size=int(rng.integers(1, 8)))]
    union = 0
    for mask in masks:
        union |= mask
    if union != full:
        masks.append(full & ~union)
    weights = [Fraction(int(w), 8) for w in rng.integers(1, 17, size=len(masks))]
    return Cover(tuple(AtomSet(GroundSet(n_coords), mask) for mask in masks), tuple(weights))


def _random_block_metric(rng, n_atoms):
    ground = GroundSet(n_atoms)
    generators = tuple(
        (AtomSet(ground, int(mask)), Fraction(int(w), 8))
        for mask, w in zip(rng.integers(1, 1 << n_atoms, size=5), rng.integers(1, 17, size=5))
    )
    phi = make_cover_generated(WeightedCoverFamily(generators, Fraction(3), ground))
    labels = rng.integers(0, 4, size=n_atoms)
    blocks = [np.flatnonzero(labels == label).tolist() for label in range(4)]
    return BlockMetric(phi, Partition.from_indices(ground, [block for block in blocks if block]))


def _check_triples(metric, n_coords, rng, count):
    for x, y, z in rng.integers(0, 3, size=(count, 3, n_coords)).tolist():
        assert metric(x, x) == 0
        assert metric(x, y) == metric(y, x) >= 0
        assert metric(x, z) <= metric(x, y) + metric(y, z)


@pytest.mark.parametrize("seed", range(10))
def test_cover_metric_on_random_triples(seed):
    rng = np.random.default_rng(seed)
    metric = CoverMetric(_random_cover(rng, 6))
    _check_triples(metric, 6, rng, 1000)


@pytest.mark.parametrize("seed", range(10))
def test_block_metric_on_random_triples(seed):
    rng = np.random.default_rng(seed)
    metric = _random_block_metric(rng, 7)
    _check_triples(metric, metric.n_coords, rng, 1000)
