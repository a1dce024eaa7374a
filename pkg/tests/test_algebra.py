"""Ground sets, covers, partitions and min-weight covers."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from submeasure_lab.algebra import (
    AtomSet,
    Cover,
    GroundSet,
    Partition,
    covering_multiplicity,
    exhaustive_min_weight_cover,
    hit_counts,
    is_uniform,
    min_weight_cover,
    refine_partitions,
    uniform_refinement,
)
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError

from .strategies import weighted_covers


def test_set_operations():
    ground = GroundSet(5)
    first = ground.atom_set([0, 1, 2])
    second = ground.atom_set([2, 3])
    assert (first | second).indices() == [0, 1, 2, 3]
    assert (first & second).indices() == [2]
    assert (first - second).indices() == [0, 1]
    assert (~first).indices() == [3, 4]
    assert first & second <= first
    assert 2 in second and 0 not in second
    assert len(ground.full()) == 5
    assert ground.empty().is_empty()


def test_sets_of_different_grounds_do_not_mix():
    with pytest.raises(InvalidInputError):
        GroundSet(3).full() | GroundSet(4).full()
    with pytest.raises(InvalidInputError):
        AtomSet(GroundSet(2), 0b100)
    with pytest.raises(InvalidInputError):
        GroundSet(0)


def test_subset_enumeration_respects_limit():
    assert len(list(GroundSet(3).subsets())) == 8
    with pytest.raises(LimitExceededError):
        list(GroundSet(10).subsets(limit=8))


def test_multiplicity_and_uniformity():
    ground = GroundSet(3)
    pairs = Cover.from_indices(ground, [[0, 1], [1, 2], [0, 2]])
    assert hit_counts(pairs) == [2, 2, 2]
    assert covering_multiplicity(pairs) == 2
    assert is_uniform(pairs)
    lopsided = Cover.from_indices(ground, [[0, 1, 2], [0]])
    assert not is_uniform(lopsided)
    refined = uniform_refinement(lopsided)
    assert is_uniform(refined)
    assert covering_multiplicity(refined) == 1


def test_cover_rejects_bad_weights():
    ground = GroundSet(2)
    with pytest.raises(InvalidInputError):
        Cover.from_indices(ground, [[0], [1]], [1])
    with pytest.raises(InvalidInputError):
        Cover.from_indices(ground, [[0], [1]], [1, -1])
    with pytest.raises(InvalidInputError):
        Cover((), None)


def test_partition_validation():
    ground = GroundSet(4)
    with pytest.raises(InvalidInputError):
        Partition.from_indices(ground, [[0, 1], [1, 2, 3]])
    with pytest.raises(InvalidInputError):
        Partition.from_indices(ground, [[0, 1], [2]])
    blocks = Partition.from_indices(ground, [[2, 3], [0, 1]])
    assert blocks.to_json() == [[0, 1], [2, 3]]
    assert blocks.block_of(3) == 1
    assert blocks.union_of(0b10).indices() == [2, 3]


def test_refinement():
    ground = GroundSet(4)
    halves = Partition.from_indices(ground, [[0, 1], [2, 3]])
    parity = Partition.from_indices(ground, [[0, 2], [1, 3]])
    common = refine_partitions(halves, parity)
    assert common == Partition.singletons(ground)
    assert common.finer_than(halves)
    assert not halves.finer_than(parity)
    assert halves.finer_than(Partition.whole(ground))


def test_min_weight_cover_small():
    ground = GroundSet(4)
    cover = Cover.from_indices(
        ground, [[0, 1], [2, 3], [1, 2], [0, 1, 2, 3]], [1, 1, Fraction(1, 2), 3]
    )
    result = min_weight_cover(ground.atom_set([1, 2]), cover)
    assert result.weight == Fraction(1, 2)
    assert result.chosen == frozenset({2})
    result = min_weight_cover(ground.full(), cover)
    assert result.weight == 2
    assert min_weight_cover(ground.empty(), cover).weight == 0


def test_min_weight_cover_infeasible():
    ground = GroundSet(3)
    cover = Cover.from_indices(ground, [[0], [1]], [1, 1])
    result = min_weight_cover(ground.full(), cover)
    assert not result.feasible


def test_unweighted_cover_cannot_price():
    ground = GroundSet(2)
    with pytest.raises(InvalidInputError):
        min_weight_cover(ground.full(), Cover.from_indices(ground, [[0, 1]]))


@given(weighted_covers(max_atoms=6, max_entries=11), st.data())
@settings(max_examples=500, deadline=None)
def test_branch_and_bound_matches_exhaustive(cover, data):
    target_mask = data.draw(st.integers(min_value=0, max_value=cover.ground.full_mask))
    target = AtomSet(cover.ground, target_mask)
    fast = min_weight_cover(target, cover)
    slow = exhaustive_min_weight_cover(target, cover)
    assert fast.weight == slow.weight
    chosen_union = 0
    for index in fast.chosen:
        chosen_union |= cover.masks[index]
    assert target_mask & ~chosen_union == 0


@given(weighted_covers(max_atoms=6, max_entries=8))
@settings(max_examples=200, deadline=None)
def test_uniform_refinement_properties(cover):
    k = covering_multiplicity(cover)
    refined = uniform_refinement(cover)
    assert is_uniform(refined)
    assert covering_multiplicity(refined) == k
    assert refined.weights == cover.weights
    assert all(new & ~old == 0 for new, old in zip(refined.masks, cover.masks))
    assert uniform_refinement(refined).masks == refined.masks
