"""Elliptic / parabolic / hyperbolic probe over a grid of xi values."""
from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from typing import Any

from submeasure_lab import const
from submeasure_lab.covnum.covering import HPhiResult, PathologyIndex, h_phi, pathology_index
from submeasure_lab.exact import Exact, exact_to_json, to_exact
from submeasure_lab.exceptions import InvalidInputError
from submeasure_lab.submeasure import Submeasure
from submeasure_lab.utils import resolve_threads

LOGGER = logging.getLogger(__name__)


class Verdict(StrEnum):
    """Class suggested by a finite grid."""

    ELLIPTIC = "elliptic-consistent"
    PARABOLIC = "parabolic-consistent"
    HYPERBOLIC = "hyperbolic-consistent"
    INCONCLUSIVE = "inconclusive"


def default_grid(phi: Submeasure, steps: int = const.DEFAULT_GRID_STEPS) -> list[Exact]:
    """xi_j = phi(X) * 2^-j for j = 1..steps (2^-j when phi(X) = 0)."""
    top = phi.total()
    if top == 0:
        top = Fraction(1)
    return [top * Fraction(1, 2**j) for j in range(1, steps + 1)]


def _check_grid(phi: Submeasure, grid: Sequence[Exact]) -> None:
    if not grid:
        raise InvalidInputError("the xi grid is empty")
    top = phi.total()
    if top == 0:
        top = Fraction(1)
    for previous, current in zip(grid, grid[1:]):
        if not current < previous:
            raise InvalidInputError("the xi grid must be strictly decreasing")
    if not grid[-1] > 0 or grid[0] > top:
        raise InvalidInputError("grid values must lie in (0, phi(X)]")


@dataclass
class ClassificationReport:
    """h_phi sampled on a decreasing grid with a heuristic verdict."""

    xi_grid: list[Exact]
    h_values: list[Exact]
    xi_h_values: list[Exact]
    resolvable: list[bool]
    verdict: Verdict
    pathology_index: PathologyIndex | None
    dual_bound_ok: bool | None
    christensen: list[bool]
    lower_bound: bool = False
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "xi_grid": [exact_to_json(x) for x in self.xi_grid],
            "h_values": [exact_to_json(h) for h in self.h_values],
            "xi_h_values": [exact_to_json(v) for v in self.xi_h_values],
            "xi_h_float": [float(v) for v in self.xi_h_values],
            "resolvable": self.resolvable,
            "verdict": str(self.verdict),
            "pathology_index": (
                self.pathology_index.to_json() if self.pathology_index is not None else None
            ),
            "dual_bound_ok": self.dual_bound_ok,
            "christensen": self.christensen,
            "lower_bound": self.lower_bound,
            "warnings": self.warnings,
        }


def _verdict(grid: list[Exact], h_values: list[Exact], resolvable: list[bool]) -> Verdict:
    points = [(xi, h) for xi, h, ok in zip(grid, h_values, resolvable) if ok]
    if not points:
        return Verdict.INCONCLUSIVE
    if all(xi * h >= 1 - xi for xi, h in points):
        return Verdict.HYPERBOLIC
    if len(points) < 2:
        return Verdict.INCONCLUSIVE
    (first_xi, first_h), (_, last_h) = points[0], points[-1]
    if last_h * 2 >= first_h:
        return Verdict.PARABOLIC
    ratios = [h / xi for xi, h in points]
    if max(ratios) <= 2 * (first_h / first_xi):
        return Verdict.ELLIPTIC
    return Verdict.INCONCLUSIVE


def classify(
    phi: Submeasure,
    xi_grid: Sequence[Any] | None = None,
    threads: int | None = None,
    with_pathology: bool = True,
) -> ClassificationReport:
    """Sample h_phi on the grid and label the trend.

    Grid points with h = 0 (nothing of size <= xi covers the space) are
    reported as unresolvable and ignored by the verdict.
    """
    grid = [to_exact(x) for x in xi_grid] if xi_grid is not None else default_grid(phi)
    _check_grid(phi, grid)
    workers = min(resolve_threads(threads), len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results: list[HPhiResult] = list(pool.map(lambda xi: h_phi(phi, xi), grid))
    else:
        results = [h_phi(phi, xi) for xi in grid]
    h_values = [result.value for result in results]
    xi_h = [xi * h for xi, h in zip(grid, h_values)]
    resolvable = [h > 0 for h in h_values]
    warnings = []
    if not all(resolvable):
        warnings.append(
            f"{resolvable.count(False)} grid point(s) have h = 0 at this truncation"
        )
    lower_bound = any(result.lower_bound for result in results)
    if lower_bound:
        warnings.append("some h values are lower bounds from a truncated generator sweep")

    index = None
    dual_bound_ok = None
    if with_pathology and phi.ground.n_atoms <= const.SUBSET_SWEEP_LIMIT:
        index = pathology_index(phi)
        if index.mass > 0:
            dual_bound_ok = all(h * index.mass <= 1 for h in h_values)
            if not dual_bound_ok:
                warnings.append("h exceeds 1 / pathology index")
    elif with_pathology:
        warnings.append("pathology index skipped: ground set too large")

    christensen = [value >= 1 - xi for xi, value in zip(grid, xi_h)]
    verdict = _verdict(grid, h_values, resolvable)
    LOGGER.info("Classification over %d grid points: %s", len(grid), verdict)
    return ClassificationReport(
        xi_grid=grid,
        h_values=h_values,
        xi_h_values=xi_h,
        resolvable=resolvable,
        verdict=verdict,
        pathology_index=index,
        dual_bound_ok=dual_bound_ok,
        christensen=christensen,
        lower_bound=lower_bound,
        warnings=warnings,
    )


# ----------------------------------------------------------------------
#  f(xi + zeta) >= f(xi) + f(zeta) - f(xi) f(zeta)
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ConvergenceReport:
    """Pairs checked, violations and the trend of f(xi)/xi as xi decreases."""

    checked: int
    violations: list[tuple[Any, Any]]
    ratios: list[tuple[Any, Any]]
    trend: str

    @property
    def holds(self) -> bool:
        """No violations."""
        return not self.violations

    def to_json(self) -> dict:
        """Serialize."""
        def encode(value: Any) -> Any:
            return value if isinstance(value, float) else exact_to_json(value)

        return {
            "checked": self.checked,
            "holds": self.holds,
            "violations": [[encode(a), encode(b)] for a, b in self.violations],
            "ratios": [[encode(xi), encode(ratio)] for xi, ratio in self.ratios],
            "trend": self.trend,
        }


def _trend(values: list[Any], tolerance: float) -> str:
    steps = [b - a for a, b in zip(values, values[1:])]
    if all(abs(float(step)) <= tolerance for step in steps):
        return "flat"
    if all(step >= -tolerance for step in steps):
        return "increasing"
    if all(step <= tolerance for step in steps):
        return "decreasing"
    return "mixed"


def convergence_diagnostic(
    samples: Sequence[tuple[Any, Any]], tolerance: float = 0.0
) -> ConvergenceReport:
    """Check the superadditivity-type inequality on all grid pairs summing onto the grid."""
    if len(samples) < 3:
        raise InvalidInputError("at least three samples are needed")
    table = {}
    for xi, value in samples:
        key = xi if isinstance(xi, float) else to_exact(xi)
        table[key] = value if isinstance(value, float) else to_exact(value)
    keys = sorted(table)
    checked = 0
    violations = []
    for position, xi in enumerate(keys):
        for zeta in keys[position:]:
            total = xi + zeta
            if total not in table:
                continue
            checked += 1
            f_xi, f_zeta = table[xi], table[zeta]
            bound = f_xi + f_zeta - f_xi * f_zeta
            if tolerance:
                bound = bound - tolerance
            if table[total] < bound:
                violations.append((xi, zeta))
    ordered = sorted(keys, reverse=True)
    ratios = [(xi, table[xi] / xi) for xi in ordered]
    return ConvergenceReport(
        checked=checked,
        violations=violations,
        ratios=ratios,
        trend=_trend([ratio for _, ratio in ratios], tolerance),
    )
