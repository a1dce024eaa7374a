"""Covering numbers, h_phi and dominated-measure certificates."""
from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from submeasure_lab import const
from submeasure_lab.algebra import AtomSet, GroundSet
from submeasure_lab.covnum.lp import Constraint, LPStatus, RationalLP, Relation, Sense, solve_lp
from submeasure_lab.exact import Exact, exact_sum, exact_to_json, to_exact
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.submeasure import AtomMeasure, CoverGeneratedSubmeasure, Submeasure
from submeasure_lab.utils import lcm_of_denominators

LOGGER = logging.getLogger(__name__)


def maximal_members(masks: Iterable[int]) -> list[int]:
    """Return the distinct inclusion-maximal non-empty masks, largest first."""
    kept: list[int] = []
    for mask in sorted({m for m in masks if m}, key=lambda m: (-m.bit_count(), m)):
        if not any(mask & other == mask for other in kept):
            kept.append(mask)
    return kept


@dataclass(frozen=True)
class CoveringCertificate:
    """Primal integer cover sequence and dual measure for a covering number.

    The dual measure gives mass at most `bound` to every member of the family
    and has total mass bound / value.
    """

    ground: GroundSet
    value: Exact
    family: tuple[AtomSet, ...]
    primal: tuple[tuple[AtomSet, int], ...]
    dual: AtomMeasure | None
    bound: Exact = Fraction(1)

    @property
    def m(self) -> int:
        """Length of the cover sequence."""
        return sum(count for _, count in self.primal)

    @property
    def t(self) -> int:
        """Least number of sequence members containing an atom."""
        if not self.primal:
            return 0
        hits = [0] * self.ground.n_atoms
        for subset, count in self.primal:
            for atom in subset:
                hits[atom] += count
        return min(hits)

    def verify(self) -> bool:
        """Recheck both sides exactly."""
        if self.value == 0:
            return not self.primal
        if self.dual is None or Fraction(self.t, self.m) != self.value:
            return False
        if any(not any(subset <= member for member in self.family) for subset, _ in self.primal):
            return False
        if self.dual.total() != self.bound / self.value:
            return False
        return all(self.dual(member) <= self.bound for member in self.family)

    def scaled(self, bound: Exact) -> CoveringCertificate:
        """Rescale the dual measure to a new family bound."""
        dual = None
        if self.dual is not None:
            factor = bound / self.bound
            dual = AtomMeasure(self.ground, [w * factor for w in self.dual.atom_weights])
        return CoveringCertificate(self.ground, self.value, self.family, self.primal, dual, bound)

    def to_json(self) -> dict:
        """Serialize: primal as atom lists with counts, dual as per-atom values."""
        return {
            "value": exact_to_json(self.value),
            "t": self.t,
            "m": self.m,
            "primal": [{"set": subset.to_json(), "count": count} for subset, count in self.primal],
            "dual": (
                [exact_to_json(w) for w in self.dual.atom_weights] if self.dual is not None else None
            ),
            "bound": exact_to_json(self.bound),
        }


def _family_ground(family: Sequence[AtomSet]) -> GroundSet:
    if not family:
        raise InvalidInputError("the family must be non-empty")
    ground = family[0].ground
    if any(member.ground != ground for member in family):
        raise InvalidInputError("family members live on different ground sets")
    if ground.n_atoms > const.HARD_MAX_ATOMS:
        raise LimitExceededError("atom count", ground.n_atoms, const.HARD_MAX_ATOMS)
    return ground


def covering_number(family: Sequence[AtomSet]) -> CoveringCertificate:
    """Return c(family) = sup over finite sequences of t/m, with certificates.

    Solves min sum x_B subject to sum_{B containing a} x_B >= 1 for every atom;
    c is the reciprocal of the optimum and the row duals form the measure.
    """
    ground = _family_ground(family)
    masks = maximal_members(member.mask for member in family)
    reduced = tuple(AtomSet(ground, mask) for mask in masks)
    union = 0
    for mask in masks:
        union |= mask
    if not masks or union != ground.full_mask:
        LOGGER.debug("Family misses atoms, covering number is 0")
        return CoveringCertificate(ground, Fraction(0), reduced, (), None)

    rows = tuple(
        Constraint(
            tuple(Fraction(mask >> atom & 1) for mask in masks), Relation.GE, Fraction(1)
        )
        for atom in range(ground.n_atoms)
    )
    result = solve_lp(RationalLP(Sense.MINIMIZE, (Fraction(1),) * len(masks), rows))
    if result.status != LPStatus.OPTIMAL:
        raise InvalidInputError(f"covering LP ended {result.status}")
    optimum = result.value
    scale = lcm_of_denominators(result.solution)
    primal = tuple(
        (subset, int(x * scale))
        for subset, x in zip(reduced, result.solution)
        if x
    )
    dual = AtomMeasure(ground, result.duals)
    certificate = CoveringCertificate(ground, 1 / optimum, reduced, primal, dual)
    LOGGER.debug(
        "Covering number %s over %d maximal sets (%d pivots)",
        certificate.value,
        len(masks),
        result.pivots,
    )
    return certificate


# ----------------------------------------------------------------------
#  h_phi
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class AdmissibleFamily:
    """Maximal members of {A : phi(A) <= xi}."""

    masks: tuple[int, ...]
    strategy: str
    visited: int
    lower_bound: bool = False


def _subset_sweep(phi: Submeasure, xi: Exact) -> AdmissibleFamily:
    n_atoms = phi.ground.n_atoms
    members = {0}
    stack = [(0, 0)]
    while stack:
        mask, start = stack.pop()
        for atom in range(start, n_atoms):
            bigger = mask | 1 << atom
            if phi.value(bigger) <= xi:
                members.add(bigger)
                stack.append((bigger, atom + 1))
    maximal = tuple(
        sorted(
            mask
            for mask in members
            if mask
            and not any(
                not mask >> atom & 1 and mask | 1 << atom in members for atom in range(n_atoms)
            )
        )
    )
    return AdmissibleFamily(maximal, "subset_sweep", len(members))


def _generator_sweep(
    phi: CoverGeneratedSubmeasure, xi: Exact, budget: int
) -> AdmissibleFamily:
    sets = phi.cover.sets
    weights = phi.cover.require_weights()
    order = sorted(range(len(sets)), key=lambda index: weights[index])
    unions: set[int] = set()
    visited = 0
    truncated = False
    stack: list[tuple[int, Exact, int]] = [(0, Fraction(0), 0)]
    while stack:
        mask, cost, start = stack.pop()
        visited += 1
        if visited > budget:
            truncated = True
            break
        unions.add(mask)
        for position in range(start, len(order)):
            index = order[position]
            total = cost + weights[index]
            if total > xi:
                # sorted by weight: later generators cost at least as much
                break
            stack.append((mask | sets[index].mask, total, position + 1))
    if truncated:
        LOGGER.warning(
            "Generator sweep stopped after %d nodes; covering number is a lower bound", budget
        )
    return AdmissibleFamily(
        tuple(maximal_members(unions)), "generator_sweep", visited, lower_bound=truncated
    )


def admissible_family(
    phi: Submeasure,
    xi: Any,
    sweep_limit: int = const.SUBSET_SWEEP_LIMIT,
    budget: int = const.GENERATOR_SWEEP_BUDGET,
) -> AdmissibleFamily:
    """Enumerate the maximal sets of phi-size at most xi."""
    xi = to_exact(xi)
    if not xi > 0:
        raise InvalidInputError("xi must be positive")
    ground = phi.ground
    if phi.total() <= xi:
        return AdmissibleFamily((ground.full_mask,), "whole_space", 1)
    if ground.n_atoms <= sweep_limit:
        return _subset_sweep(phi, xi)
    if isinstance(phi, CoverGeneratedSubmeasure):
        return _generator_sweep(phi, xi, budget)
    raise LimitExceededError("atom count", ground.n_atoms, sweep_limit)


@dataclass(frozen=True)
class HPhiResult:
    """h_phi(xi) = c(A_{phi,xi}) / xi with the certificate scaled to xi."""

    xi: Exact
    value: Exact
    certificate: CoveringCertificate
    family_size: int
    strategy: str
    lower_bound: bool = False

    @property
    def covering(self) -> Exact:
        """The covering number itself."""
        return self.certificate.value

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "xi": exact_to_json(self.xi),
            "h": exact_to_json(self.value),
            "xi_h": exact_to_json(self.xi * self.value),
            "covering_number": exact_to_json(self.covering),
            "family_size": self.family_size,
            "strategy": self.strategy,
            "lower_bound": self.lower_bound,
            "certificate": self.certificate.to_json(),
        }


def h_phi(phi: Submeasure, xi: Any) -> HPhiResult:
    """Compute h_phi(xi) exactly on a finite algebra."""
    xi = to_exact(xi)
    family = admissible_family(phi, xi)
    if not family.masks:
        certificate = CoveringCertificate(phi.ground, Fraction(0), (), (), None)
    else:
        certificate = covering_number([AtomSet(phi.ground, mask) for mask in family.masks])
    value = certificate.value / xi
    LOGGER.debug("h(%s) = %s from %d maximal sets", xi, value, len(family.masks))
    return HPhiResult(
        xi=xi,
        value=value,
        certificate=certificate.scaled(xi),
        family_size=len(family.masks),
        strategy=family.strategy,
        lower_bound=family.lower_bound,
    )


# ----------------------------------------------------------------------
#  Dominated measures
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class PathologyIndex:
    """Largest total mass of a measure dominated by phi."""

    mass: Exact
    witness: AtomMeasure
    columns: int

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "mass": exact_to_json(self.mass),
            "witness": [exact_to_json(w) for w in self.witness.atom_weights],
            "columns": self.columns,
        }


def pathology_index(
    phi: Submeasure, limit: int = const.SUBSET_SWEEP_LIMIT
) -> PathologyIndex:
    """Maximize mu(X) over measures mu <= phi; 0 means no dominated measure."""
    ground = phi.ground
    ground.check_enumerable(limit)
    singles = [phi.value(1 << atom) for atom in range(ground.n_atoms)]
    columns: list[int] = []
    costs: list[Exact] = []
    for mask in range(1, 1 << ground.n_atoms):
        value = phi.value(mask)
        if mask.bit_count() > 1:
            # a set no cheaper than its atoms adds no constraint
            if value >= exact_sum(singles[atom] for atom in range(ground.n_atoms) if mask >> atom & 1):
                continue
        columns.append(mask)
        costs.append(value)
    rows = tuple(
        Constraint(tuple(Fraction(mask >> atom & 1) for mask in columns), Relation.GE, Fraction(1))
        for atom in range(ground.n_atoms)
    )
    result = solve_lp(RationalLP(Sense.MINIMIZE, tuple(costs), rows))
    if result.status != LPStatus.OPTIMAL:
        raise InvalidInputError(f"dominated-measure LP ended {result.status}")
    witness = AtomMeasure(ground, result.duals)
    LOGGER.debug("Pathology index %s over %d columns", result.value, len(columns))
    return PathologyIndex(result.value, witness, len(columns))


@dataclass(frozen=True)
class ChristensenGap:
    """Compare xi * h_phi(xi) with 1 - xi."""

    xi: Exact
    xi_h: Exact
    one_minus_xi: Exact
    satisfied: bool
    certificate: CoveringCertificate = field(repr=False)

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "xi": exact_to_json(self.xi),
            "xi_h": exact_to_json(self.xi_h),
            "one_minus_xi": exact_to_json(self.one_minus_xi),
            "satisfied": self.satisfied,
            "sequence": [
                {"set": subset.to_json(), "count": count} for subset, count in self.certificate.primal
            ],
        }


def christensen_gap(phi: Submeasure, xi: Any) -> ChristensenGap:
    """Check xi * h_phi(xi) >= 1 - xi."""
    xi = to_exact(xi)
    if not 0 < xi < 1:
        raise InvalidInputError("xi must lie in (0, 1)")
    result = h_phi(phi, xi)
    xi_h = xi * result.value
    return ChristensenGap(xi, xi_h, 1 - xi, xi_h >= 1 - xi, result.certificate)
