"""Covering numbers, h_phi, the pathology index and classification."""
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

from submeasure_lab.algebra import GroundSet
from submeasure_lab.covnum import (
    Verdict,
    admissible_family,
    christensen_gap,
    classify,
    convergence_diagnostic,
    covering_number,
    default_grid,
    h_phi,
    pathology_index,
)
from submeasure_lab.exceptions import InvalidInputError
from submeasure_lab.submeasure import CoverGeneratedSubmeasure, make_measure, tree_submeasure

from .strategies import families, generator_families


def _best_ratio(n_atoms: int, masks: list[int], max_count: int) -> Fraction:
    """sup of t/m over sequences using each member at most max_count times."""
    best = Fraction(0)
    for counts in product(range(max_count + 1), repeat=len(masks)):
        m = sum(counts)
        if not m:
            continue
        hits = [
            sum(count for count, mask in zip(counts, masks) if mask >> atom & 1)
            for atom in range(n_atoms)
        ]
        best = max(best, Fraction(min(hits), m))
    return best


def test_covering_number_of_pairs():
    ground = GroundSet(3)
    family = [ground.atom_set(pair) for pair in ([0, 1], [1, 2], [0, 2])]
    certificate = covering_number(family)
    assert certificate.value == Fraction(2, 3)
    assert (certificate.t, certificate.m) == (2, 3)
    assert certificate.verify()
    assert certificate.dual.total() == Fraction(3, 2)


def test_covering_number_ignores_non_maximal_members():
    ground = GroundSet(3)
    family = [ground.atom_set([0]), ground.atom_set([0, 1]), ground.atom_set([2])]
    certificate = covering_number(family)
    assert certificate.value == 1
    assert len(certificate.family) == 2


def test_covering_number_of_incomplete_family_is_zero():
    ground = GroundSet(3)
    certificate = covering_number([ground.atom_set([0, 1])])
    assert certificate.value == 0
    assert certificate.verify()
    with pytest.raises(InvalidInputError):
        covering_number([])


@given(families(max_atoms=4, max_members=4))
@settings(max_examples=40, deadline=None)
def test_covering_number_against_bounded_sequences(family):
    n_atoms, masks = family
    union = 0
    for mask in masks:
        union |= mask
    ground = GroundSet(n_atoms)
    certificate = covering_number([ground.atom_set(_bits(mask)) for mask in masks])
    assert certificate.verify()
    brute = _best_ratio(n_atoms, masks, 3)
    if union != ground.full_mask:
        assert certificate.value == 0 == brute
    else:
        assert brute <= certificate.value
        assert Fraction(certificate.t, certificate.m) == certificate.value


@given(families(max_atoms=6, max_members=20))
@settings(max_examples=200, deadline=None)
def test_primal_and_dual_values_agree(family):
    n_atoms, masks = family
    ground = GroundSet(n_atoms)
    certificate = covering_number([ground.atom_set(_bits(mask)) for mask in masks])
    assert certificate.verify()
    if certificate.value:
        assert Fraction(certificate.t, certificate.m) == certificate.value
        assert certificate.dual.total() * certificate.value == certificate.bound


@pytest.mark.parametrize(
    ("xi", "expected"),
    [(Fraction(3, 2), Fraction(1, 3)), (Fraction(3, 4), Fraction(2, 9)), (Fraction(3, 8), 0)],
)
def test_h_of_six_half_atoms(half_atoms, xi, expected):
    result = h_phi(half_atoms, xi)
    assert result.value == expected
    assert result.certificate.verify()


@pytest.mark.parametrize("xi", [Fraction(3, 2), Fraction(3, 4)])
def test_h_of_twelve_quarter_atoms(quarter_atoms, xi):
    assert h_phi(quarter_atoms, xi).value == Fraction(1, 3)


def test_h_bounded_by_pathology_index(half_atoms):
    index = pathology_index(half_atoms)
    assert index.mass == 3
    for xi in default_grid(half_atoms):
        assert h_phi(half_atoms, xi).value * index.mass <= 1


@given(generator_families(max_atoms=5, max_generators=5))
@settings(max_examples=40, deadline=None)
def test_dual_bound_on_cover_generated(family):
    phi = CoverGeneratedSubmeasure(family)
    index = pathology_index(phi)
    for atom in range(phi.ground.n_atoms):
        assert index.witness.value(1 << atom) <= phi.value(1 << atom)
    for xi in default_grid(phi, steps=4):
        result = h_phi(phi, xi)
        assert result.certificate.verify()
        assert result.value * index.mass <= 1


@given(generator_families(max_atoms=5, max_generators=5))
@settings(max_examples=40, deadline=None)
def test_generator_sweep_matches_subset_sweep(family):
    phi = CoverGeneratedSubmeasure(family)
    for xi in default_grid(phi, steps=4):
        by_subsets = admissible_family(phi, xi)
        by_generators = admissible_family(phi, xi, sweep_limit=0)
        assert sorted(by_subsets.masks) == sorted(by_generators.masks)


def test_generator_sweep_on_large_ground():
    # 18 leaves under three blocks; only single blocks or single leaves fit under 1/2
    phi = tree_submeasure([3, 6], [1, Fraction(1, 2), Fraction(1, 3)])
    result = h_phi(phi, Fraction(1, 2))
    assert result.strategy == "generator_sweep"
    assert not result.lower_bound
    assert result.family_size == 3
    assert result.value == Fraction(2, 3)


def test_whole_space_is_admissible_at_total(half_atoms):
    result = h_phi(half_atoms, 3)
    assert result.strategy == "whole_space"
    assert result.value == Fraction(1, 3)


def test_christensen_gap(half_atoms):
    normalized = make_measure([Fraction(1, 8)] * 8)
    gap = christensen_gap(normalized, Fraction(1, 2))
    assert gap.xi_h == Fraction(1, 2)
    assert gap.satisfied
    assert not christensen_gap(normalized, Fraction(1, 4)).satisfied
    with pytest.raises(InvalidInputError):
        christensen_gap(half_atoms, 2)


def test_measure_classifies_as_parabolic():
    phi = make_measure([Fraction(1, 8)] * 8)
    report = classify(phi, threads=1)
    assert report.verdict == Verdict.PARABOLIC
    assert report.h_values[:3] == [1, 1, 1]
    assert report.dual_bound_ok
    assert report.resolvable.count(False) == 7
    assert report.warnings


def test_classify_rejects_bad_grids(half_atoms):
    with pytest.raises(InvalidInputError):
        classify(half_atoms, [Fraction(1, 4), Fraction(1, 2)])
    with pytest.raises(InvalidInputError):
        classify(half_atoms, [4])
    with pytest.raises(InvalidInputError):
        classify(half_atoms, [])


def test_classify_threads_do_not_change_results(half_atoms):
    grid = [Fraction(3, 2), Fraction(1), Fraction(3, 4)]
    single = classify(half_atoms, grid, threads=1)
    pooled = classify(half_atoms, grid, threads=3)
    assert single.to_json() == pooled.to_json()


def test_convergence_diagnostic():
    grid = [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]
    report = convergence_diagnostic([(xi, xi) for xi in grid])
    assert report.checked == 2
    assert report.holds
    assert report.trend == "flat"
    broken = convergence_diagnostic(
        [(Fraction(1, 4), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 10)), (Fraction(3, 4), 1)]
    )
    assert not broken.holds
    with pytest.raises(InvalidInputError):
        convergence_diagnostic([(Fraction(1, 2), 1)])


def _bits(mask: int) -> list[int]:
    return [atom for atom in range(mask.bit_length()) if mask >> atom & 1]
