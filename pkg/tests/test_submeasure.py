"""Submeasure models, the axiom audit and the worked constructions."""
from fractions import Fraction

import pytest
from hypothesis import given, settings

from submeasure_lab.algebra import GroundSet
from submeasure_lab.exact import Surd
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.submeasure import (
    CoverGeneratedSubmeasure,
    TableSubmeasure,
    WeightedCoverFamily,
    audit_submeasure,
    berry_esseen_params,
    example_easy,
    log_theta,
    make_measure,
    make_table,
    power_theta,
    tree_submeasure,
    validate_m_rule,
    zero_submeasure,
)

from .strategies import generator_families


def test_measure_values(half_atoms):
    assert half_atoms.total() == 3
    assert half_atoms.value(0b101) == 1
    assert half_atoms(half_atoms.ground.atom_set([0, 1, 2])) == Fraction(3, 2)
    assert zero_submeasure(GroundSet(3)).total() == 0


def test_measure_rejects_negative_weights():
    with pytest.raises(InvalidInputError):
        make_measure([1, -1])


def test_table_default_and_missing_values():
    ground = GroundSet(2)
    table = make_table(ground, {0b01: 1, 0b10: 1, 0b11: Fraction(3, 2)})
    assert table.value(0b11) == Fraction(3, 2)
    with pytest.raises(InvalidInputError):
        table.value(0)
    padded = make_table(ground, {0b11: 2}, default=1)
    assert padded.value(0) == 0
    assert padded.value(0b01) == 1


def test_audit_flags_superadditive_table():
    ground = GroundSet(2)
    table = make_table(ground, {0: 0, 0b01: 1, 0b10: 1, 0b11: 3})
    report = audit_submeasure(table)
    assert not report.passed
    assert report.mode == "exhaustive"
    assert report.counterexample["axiom"] == "subadditivity"


def test_audit_flags_non_monotone_table():
    ground = GroundSet(2)
    table = make_table(ground, {0: 0, 0b01: 2, 0b10: 1, 0b11: 1})
    report = audit_submeasure(table)
    assert report.counterexample["axiom"] == "monotonicity"


def test_audit_flags_nonzero_empty_set():
    table = make_table(GroundSet(1), {0: 1, 1: 1})
    assert audit_submeasure(table).counterexample["axiom"] == "empty"


def test_random_audit_on_larger_ground(quarter_atoms):
    report = audit_submeasure(quarter_atoms, trials=200, seed=7, exhaustive=False)
    assert report.passed
    assert report.mode == "random"
    assert report.checked == 200


def test_sqrt_of_measure_is_a_submeasure():
    ground = GroundSet(4)
    phi = TableSubmeasure.from_function(ground, lambda subset: Surd.sqrt(len(subset)))
    assert audit_submeasure(phi).passed


@given(generator_families())
@settings(max_examples=60, deadline=None)
def test_cover_generated_strategies_agree(family):
    phi = CoverGeneratedSubmeasure(family)
    assert phi.strategy == "table"
    for mask in range(1 << phi.ground.n_atoms):
        assert phi.value(mask) == phi.branch_and_bound_value(mask)
    assert audit_submeasure(phi).passed


def test_cover_generated_value():
    ground = GroundSet(3)
    family = WeightedCoverFamily(
        ((ground.atom_set([0, 1]), Fraction(1, 3)), (ground.atom_set([2]), Fraction(1, 2))),
        Fraction(1),
        ground,
    )
    phi = CoverGeneratedSubmeasure(family)
    assert phi.value(0b011) == Fraction(1, 3)
    assert phi.value(0b111) == Fraction(5, 6)
    assert phi.value(0b101) == Fraction(5, 6)


def test_cover_family_rejects_zero_weight():
    ground = GroundSet(2)
    with pytest.raises(InvalidInputError):
        WeightedCoverFamily(((ground.full(), 0),), Fraction(1), ground)


def test_example_easy_depth_two(easy_depth_two):
    assert easy_depth_two.m_values == (1, 8)
    assert easy_depth_two.index.ground.n_atoms == 4
    assert easy_depth_two.xi[2] == Surd.sqrt(Fraction(1, 8))
    assert easy_depth_two.measure(2).total() == Surd.sqrt(8) / 2
    assert easy_depth_two.check_block_bound() == []
    checked, violations = easy_depth_two.exhaustive_domination_check()
    assert checked == 16
    assert violations == []
    assert audit_submeasure(easy_depth_two.submeasure).passed


def test_example_easy_depth_three_sampled():
    example = example_easy(3)
    # M = 1, 8, 27 gives level sizes 1, 4, 9
    assert example.index.ground.n_atoms == 36
    assert example.check_block_bound() == []
    checked, violations = example.sample_domination_check(100_000, seed=3)
    assert checked == 100_000
    assert violations == []


def test_m_rule_validation():
    assert validate_m_rule(lambda n: n**3, 2) == (1, 8, 27)
    with pytest.raises(InvalidInputError):
        validate_m_rule(lambda n: n + 1, 2)
    with pytest.raises(InvalidInputError):
        validate_m_rule(lambda n: 5 * n if n > 1 else 100, 2)


def test_tree_submeasure_prices_prefixes():
    phi = tree_submeasure([2, 2], [1, Fraction(1, 2), Fraction(1, 4)])
    assert phi.ground.n_atoms == 4
    assert phi.value(0b0011) == Fraction(1, 2)
    assert phi.value(0b0001) == Fraction(1, 4)
    assert phi.value(0b0101) == Fraction(1, 2)
    assert phi.value(0b1111) == 1
    with pytest.raises(InvalidInputError):
        tree_submeasure([2, 2], [1, 1])


def test_tree_submeasure_leaf_cap():
    with pytest.raises(LimitExceededError):
        tree_submeasure([64, 64, 64, 64, 64], [1] * 6)


@pytest.mark.parametrize(
    ("theta", "levels"), [(power_theta(1), 3), (power_theta("0.5"), 3), (log_theta(), 1)]
)
def test_berry_esseen_params_satisfy_their_relations(theta, levels):
    params = berry_esseen_params(theta, levels)
    checks = params.check()
    assert all(checks.values()), checks
    assert params.w_values[0] == 1
    assert list(params.w_values) == sorted(params.w_values, reverse=True)


def test_berry_esseen_params_limits():
    with pytest.raises(LimitExceededError):
        berry_esseen_params(power_theta(1), 20)
    with pytest.raises(InvalidInputError):
        berry_esseen_params(power_theta(1), 2, k_const="0.5")
    with pytest.raises(InvalidInputError):
        power_theta(0)
