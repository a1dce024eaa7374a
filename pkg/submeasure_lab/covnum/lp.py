"""Exact linear programming over ordered fields of exact values."""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Any

from submeasure_lab.exact import Exact, exact_sum, to_exact
from submeasure_lab.exceptions import InvalidInputError

LOGGER = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


class Sense(StrEnum):
    """Optimization direction."""

    MAXIMIZE = "max"
    MINIMIZE = "min"


class Relation(StrEnum):
    """Constraint relation."""

    LE = "<="
    EQ = "="
    GE = ">="


class LPStatus(StrEnum):
    """Solver verdict."""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    """One row: coefficients . x (relation) rhs."""

    coefficients: tuple[Exact, ...]
    relation: Relation
    rhs: Exact

    def __post_init__(self):
        """Normalize values to exact numbers."""
        object.__setattr__(self, "coefficients", tuple(to_exact(c) for c in self.coefficients))
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", to_exact(self.rhs))

    def satisfied_by(self, solution: Sequence[Exact]) -> bool:
        """Check the row exactly."""
        lhs = exact_sum(c * x for c, x in zip(self.coefficients, solution) if c)
        if self.relation == Relation.LE:
            return lhs <= self.rhs
        if self.relation == Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class RationalLP:
    """Optimize objective . x subject to the constraints and x >= lower_bounds."""

    sense: Sense
    objective: tuple[Exact, ...]
    constraints: tuple[Constraint, ...]
    lower_bounds: tuple[Exact, ...] | None = None

    def __post_init__(self):
        """Validate dimensions."""
        object.__setattr__(self, "sense", Sense(self.sense))
        object.__setattr__(self, "objective", tuple(to_exact(c) for c in self.objective))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n_vars = len(self.objective)
        if n_vars == 0:
            raise InvalidInputError("an LP needs at least one variable")
        for index, row in enumerate(self.constraints):
            if len(row.coefficients) != n_vars:
                raise InvalidInputError(
                    f"constraint {index} has {len(row.coefficients)} coefficients, expected {n_vars}"
                )
        if self.lower_bounds is not None:
            if len(self.lower_bounds) != n_vars:
                raise InvalidInputError("lower bounds do not match the variable count")
            object.__setattr__(
                self, "lower_bounds", tuple(to_exact(b) for b in self.lower_bounds)
            )

    @property
    def n_vars(self) -> int:
        """Number of variables."""
        return len(self.objective)


@dataclass(frozen=True)
class LPResult:
    """Outcome of solve_lp.

    duals[i] is the rate of change of the optimum in the rhs of constraint i.
    """

    status: LPStatus
    value: Exact | None = None
    solution: tuple[Exact, ...] | None = None
    duals: tuple[Exact, ...] | None = None
    basis: tuple[int, ...] = ()
    pivots: int = 0
    redundant_rows: tuple[int, ...] = field(default=())

    @property
    def optimal(self) -> bool:
        """Whether an optimum was found."""
        return self.status == LPStatus.OPTIMAL


class _Tableau:
    """Dense simplex tableau with a reduced-cost row; last column holds the rhs."""

    def __init__(self, rows: list[list[Exact]], basis: list[int], n_cols: int):
        self.rows = rows
        self.basis = basis
        self.n_cols = n_cols
        self.reduced: list[Exact] = [ZERO] * (n_cols + 1)
        self.pivots = 0

    def price(self, costs: Sequence[Exact]) -> None:
        """Set the reduced-cost row for a cost vector."""
        reduced = list(costs) + [ZERO]
        for row, basic in zip(self.rows, self.basis):
            weight = costs[basic]
            if weight:
                for col, entry in enumerate(row):
                    if entry:
                        reduced[col] = reduced[col] - weight * entry
        self.reduced = reduced

    def pivot(self, pivot_row: int, col: int) -> None:
        """Pivot on (pivot_row, col)."""
        row = self.rows[pivot_row]
        inverse = ONE / row[col]
        row = [entry * inverse if entry else ZERO for entry in row]
        self.rows[pivot_row] = row
        support = [index for index, entry in enumerate(row) if entry]
        for index, other in enumerate(self.rows):
            if index == pivot_row:
                continue
            factor = other[col]
            if factor:
                for pos in support:
                    other[pos] = other[pos] - factor * row[pos]
        factor = self.reduced[col]
        if factor:
            for pos in support:
                self.reduced[pos] = self.reduced[pos] - factor * row[pos]
        self.basis[pivot_row] = col
        self.pivots += 1

    def run(self, allowed: Sequence[bool]) -> LPStatus:
        """Minimize with Bland's rule over the allowed columns."""
        while True:
            entering = next(
                (
                    col
                    for col in range(self.n_cols)
                    if allowed[col] and self.reduced[col] < 0
                ),
                None,
            )
            if entering is None:
                return LPStatus.OPTIMAL
            leaving = None
            best: Exact | None = None
            for index, row in enumerate(self.rows):
                entry = row[entering]
                if entry > 0:
                    ratio = row[-1] / entry
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[index] < self.basis[leaving])
                    ):
                        best, leaving = ratio, index
            if leaving is None:
                return LPStatus.UNBOUNDED
            self.pivot(leaving, entering)

    def objective(self) -> Exact:
        """Current objective value."""
        return -self.reduced[-1]


def solve_lp(lp: RationalLP) -> LPResult:
    """Solve exactly by two-phase simplex with Bland's anti-cycling rule."""
    n_vars = lp.n_vars
    shift = lp.lower_bounds or (ZERO,) * n_vars
    sign = -1 if lp.sense == Sense.MAXIMIZE else 1
    costs_min = [sign * c for c in lp.objective]

    # normalize rows to rhs >= 0 with x' = x - lower
    normalized: list[tuple[list[Exact], Relation, Exact, int]] = []
    for row in lp.constraints:
        coeffs = list(row.coefficients)
        rhs = row.rhs - exact_sum(c * s for c, s in zip(coeffs, shift) if c and s)
        relation = row.relation
        flip = 1
        if rhs < 0 or (rhs == 0 and relation == Relation.GE):
            coeffs = [-c for c in coeffs]
            rhs = -rhs
            flip = -1
            if relation == Relation.LE:
                relation = Relation.GE
            elif relation == Relation.GE:
                relation = Relation.LE
        normalized.append((coeffs, relation, rhs, flip))

    n_rows = len(normalized)
    slack_col: list[int | None] = [None] * n_rows
    surplus_col: list[int | None] = [None] * n_rows
    artificial_col: list[int | None] = [None] * n_rows
    n_cols = n_vars
    for index, (_, relation, _, _) in enumerate(normalized):
        if relation == Relation.LE:
            slack_col[index] = n_cols
            n_cols += 1
        elif relation == Relation.GE:
            surplus_col[index] = n_cols
            n_cols += 1
    for index, (_, relation, _, _) in enumerate(normalized):
        if relation != Relation.LE:
            artificial_col[index] = n_cols
            n_cols += 1

    rows: list[list[Exact]] = []
    basis: list[int] = []
    for index, (coeffs, _, rhs, _) in enumerate(normalized):
        row: list[Exact] = coeffs + [ZERO] * (n_cols - n_vars) + [rhs]
        if slack_col[index] is not None:
            row[slack_col[index]] = ONE
            basis.append(slack_col[index])
        else:
            if surplus_col[index] is not None:
                row[surplus_col[index]] = -ONE
            row[artificial_col[index]] = ONE
            basis.append(artificial_col[index])
        rows.append(row)

    tableau = _Tableau(rows, basis, n_cols)
    is_artificial = [False] * n_cols
    for col in artificial_col:
        if col is not None:
            is_artificial[col] = True

    row_ids = list(range(n_rows))
    redundant: list[int] = []
    if any(is_artificial):
        tableau.price([ONE if flag else ZERO for flag in is_artificial])
        tableau.run([True] * n_cols)
        if tableau.objective() > 0:
            LOGGER.debug("LP infeasible after %d phase one pivots", tableau.pivots)
            return LPResult(LPStatus.INFEASIBLE, pivots=tableau.pivots)
        for position in range(len(tableau.rows) - 1, -1, -1):
            if not is_artificial[tableau.basis[position]]:
                continue
            row = tableau.rows[position]
            col = next(
                (c for c in range(n_cols) if not is_artificial[c] and row[c]), None
            )
            if col is None:
                redundant.append(row_ids[position])
                del tableau.rows[position]
                del tableau.basis[position]
                del row_ids[position]
            else:
                tableau.pivot(position, col)

    allowed = [not flag for flag in is_artificial]
    tableau.price(costs_min + [ZERO] * (n_cols - n_vars))
    status = tableau.run(allowed)
    if status == LPStatus.UNBOUNDED:
        LOGGER.debug("LP unbounded after %d pivots", tableau.pivots)
        return LPResult(LPStatus.UNBOUNDED, pivots=tableau.pivots)

    values: list[Exact] = [ZERO] * n_cols
    for row, basic in zip(tableau.rows, tableau.basis):
        values[basic] = row[-1]
    solution = tuple(values[col] + shift[col] for col in range(n_vars))
    value = exact_sum(c * x for c, x in zip(lp.objective, solution) if c)

    duals: list[Exact] = []
    for index in range(n_rows):
        if index in redundant:
            duals.append(ZERO)
            continue
        if slack_col[index] is not None:
            dual = -tableau.reduced[slack_col[index]]
        elif surplus_col[index] is not None:
            dual = tableau.reduced[surplus_col[index]]
        else:
            dual = -tableau.reduced[artificial_col[index]]
        duals.append(dual * normalized[index][3] * sign)
    LOGGER.debug(
        "LP solved: %d rows, %d columns, %d pivots", n_rows, n_cols, tableau.pivots
    )
    return LPResult(
        LPStatus.OPTIMAL,
        value=value,
        solution=solution,
        duals=tuple(duals),
        basis=tuple(tableau.basis),
        pivots=tableau.pivots,
        redundant_rows=tuple(sorted(redundant)),
    )


def make_lp(
    sense: str,
    objective: Sequence[Any],
    rows: Sequence[tuple[Sequence[Any], str, Any]],
    lower_bounds: Sequence[Any] | None = None,
) -> RationalLP:
    """Build an LP from plain tuples."""
    return RationalLP(
        Sense(sense),
        tuple(objective),
        tuple(Constraint(tuple(coeffs), Relation(rel), rhs) for coeffs, rel, rhs in rows),
        tuple(lower_bounds) if lower_bounds is not None else None,
    )
