"""Tree labelings, the repair relation and the binomial comparison."""
from fractions import Fraction

import numpy as np
import pytest

from submeasure_lab.conclab import (
    TreeSpec,
    berry_esseen_bound,
    claim_msds_check,
    count_root_zero,
    pack_labeling,
    relatable_differences,
    relatable_differences_bruteforce,
    sim_related,
    sim_related_bruteforce,
    ybar_extension,
    yhat_extension,
)
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError


def _majority(level, count, size):
    return 2 * count > size


def test_tree_spec_shape():
    spec = TreeSpec((3, 2), (1, 1))
    assert spec.n_leaves == 6
    assert spec.n_nodes == 10
    assert spec.children((1,)) == [(1, 0), (1, 1)]
    assert spec.leaf_span((1,)) == range(2, 4)
    assert spec.subtree_mask((2,)) == 0b110000
    assert spec.thresholds == (Fraction(1), Fraction(1))
    assert spec.to_json() == {"level_sizes": [3, 2], "thresholds": ["1/1", "1/1"]}


@pytest.mark.parametrize(
    ("sizes", "thresholds", "error"),
    [
        ((), (), InvalidInputError),
        ((2, 1), (1, 1), InvalidInputError),
        ((2, 2), (1,), InvalidInputError),
        ((2, 2), (1, 0), InvalidInputError),
        ((5, 5), (1, 1), LimitExceededError),
    ],
)
def test_tree_spec_validation(sizes, thresholds, error):
    with pytest.raises(error):
        TreeSpec(sizes, thresholds)


def test_extensions():
    spec = TreeSpec((2, 2), (1, "1/2"))
    y = pack_labeling([1, 1, 1, 0])
    ybar = ybar_extension(y, spec)
    assert (ybar[(0,)], ybar[(1,)], ybar[()]) == (1, 0, 0)
    yhat = yhat_extension(y, spec)
    # nodes above the leaves need 1 + 1/2 ones, so one of two is not enough
    assert yhat[(1,)] == 0
    assert yhat[()] == 0
    with pytest.raises(InvalidInputError):
        ybar_extension(1 << 4, spec)
    with pytest.raises(InvalidInputError):
        pack_labeling([0, 2])


@pytest.mark.parametrize("sizes", [(2, 2), (3, 2)])
def test_claim_with_unit_thresholds(sizes):
    spec = TreeSpec(sizes, (1, 1))
    report = claim_msds_check(spec)
    assert report.passed
    assert report.inclusion_holds
    assert report.relation_cross_checked
    assert report.size_a >= report.lower_bound
    assert report.to_json()["passed"]


def test_claim_sizes_on_small_trees():
    assert claim_msds_check(TreeSpec((2, 2), (1, 1))).size_a == 15
    report = claim_msds_check(TreeSpec((3, 2), (1, 1)))
    assert (report.size_a, report.size_b) == (54, 63)


def test_unit_thresholds_relate_only_equal_labelings():
    spec = TreeSpec((2, 2), (1, 1))
    table = relatable_differences(spec)
    assert np.flatnonzero(table).tolist() == [0]
    assert sim_related(5, 5, spec)
    assert not sim_related(5, 4, spec)


@pytest.mark.parametrize(
    ("sizes", "thresholds"),
    [((2, 2), (2, 2)), ((3, 2), ("3/2", 1)), ((2, 3), (1, 2)), ((2, 2), ("1/2", 2))],
)
def test_relation_matches_enumeration(sizes, thresholds):
    spec = TreeSpec(sizes, thresholds)
    assert np.array_equal(relatable_differences(spec), relatable_differences_bruteforce(spec))


def test_repair_with_two_picks():
    spec = TreeSpec((2, 2), (2, 2))
    assert sim_related(0, 0b0011, spec)
    assert sim_related_bruteforce(0, 0b0011, spec)
    assert not sim_related(0, 0b1111, spec)
    assert not sim_related_bruteforce(0, 0b1111, spec)
    assert relatable_differences(spec).sum() == 15


@pytest.mark.parametrize("sizes", [(2, 2), (3, 2), (2, 2, 3), (4, 4)])
def test_count_root_zero_matches_enumeration(sizes):
    spec = TreeSpec(sizes, (1,) * len(sizes))
    report = claim_msds_check(spec)
    assert count_root_zero(spec, _majority) == report.size_a


def test_large_tree_skips_inclusion():
    report = claim_msds_check(TreeSpec((4, 5), (1, 1)))
    assert report.inclusion_holds is None
    assert report.relation_cross_checked is None
    assert report.size_holds
    with pytest.raises(LimitExceededError):
        relatable_differences(TreeSpec((4, 5), (1, 1)))


def test_berry_esseen_bound():
    check = berry_esseen_bound(0.51, 0.1, 100)
    assert check.rhs == pytest.approx(0.3)
    assert 0 < check.gap < check.rhs
    assert check.holds
    assert check.to_json()["holds"]
    with pytest.raises(InvalidInputError):
        berry_esseen_bound(0.8, 0.1, 100)
    with pytest.raises(InvalidInputError):
        berry_esseen_bound(0.6, -0.1, 100)
    with pytest.raises(InvalidInputError):
        berry_esseen_bound(0.6, 0.1, 100, k_const=0.5)
