"""Concentration functions of finite metric measure spaces."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from submeasure_lab import const
from submeasure_lab.algebra import AtomSet, GroundSet, Partition
from submeasure_lab.conclab.tail import Scenario, Selector, enumerate_points
from submeasure_lab.covnum.covering import covering_number
from submeasure_lab.entropy import tail_bound
from submeasure_lab.exact import Exact
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.metric import BlockMetric, difference_masks
from submeasure_lab.submeasure import Submeasure
from submeasure_lab.utils import format_rational, iter_bits, lcm_of_denominators, parse_rational, spawn_rng

LOGGER = logging.getLogger(__name__)


@dataclass
class FiniteSpace:
    """Finitely many points with exact masses and a metric given per difference mask."""

    points: np.ndarray
    masses: list[Fraction]
    distance: Callable[[int], Any]
    selector_values: np.ndarray | None = None
    alphabet_sizes: tuple[int, ...] = ()

    def __post_init__(self):
        """Validate masses."""
        if len(self.masses) != len(self.points):
            raise InvalidInputError("one mass per point is needed")
        if sum(self.masses) != 1 or any(m < 0 for m in self.masses):
            raise InvalidInputError("point masses must be non-negative and sum to 1")
        if len(self.points) > const.ALPHA_SAMPLED_MAX_POINTS:
            raise LimitExceededError("point count", len(self.points), const.ALPHA_SAMPLED_MAX_POINTS)

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> FiniteSpace:
        """The scenario's product with d_{C,w} in exact arithmetic."""
        points, masses = enumerate_points(scenario)
        return cls(
            points=points,
            masses=masses,
            distance=scenario.exact_metric.by_mask,
            selector_values=scenario.evaluate(points),
            alphabet_sizes=tuple(scenario.alphabet_sizes),
        )

    @classmethod
    def block_space(cls, phi: Submeasure, partition: Partition) -> FiniteSpace:
        """{0,1}^blocks, uniform, with delta_{phi,B}."""
        n_blocks = len(partition)
        size = 1 << n_blocks
        if size > const.ALPHA_SAMPLED_MAX_POINTS:
            raise LimitExceededError("point count", size, const.ALPHA_SAMPLED_MAX_POINTS)
        points = np.array(np.unravel_index(np.arange(size), (2,) * n_blocks)).T
        metric = BlockMetric(phi, partition)
        return cls(
            points=points,
            masses=[Fraction(1, size)] * size,
            distance=metric.by_mask,
            selector_values=points.mean(axis=1),
            alphabet_sizes=(2,) * n_blocks,
        )

    @property
    def size(self) -> int:
        """Number of points."""
        return len(self.points)

    @cached_property
    def masks(self) -> np.ndarray:
        """Pairwise difference masks."""
        return difference_masks(self.points)

    @cached_property
    def _distances(self) -> dict[int, Any]:
        return {int(mask): self.distance(int(mask)) for mask in set(self.masks.ravel().tolist())}

    def distance_matrix(self) -> list[list[Any]]:
        """All pairwise distances."""
        return [[self._distances[int(mask)] for mask in row] for row in self.masks]

    def diameter(self) -> Any:
        """Largest distance."""
        return max(self._distances.values())

    def neighborhoods(self, epsilon: Fraction) -> list[int]:
        """Per point, the mask of points at distance < epsilon."""
        close = {mask for mask, value in self._distances.items() if value < epsilon}
        result = []
        for row in self.masks:
            mask = 0
            for index, diff in enumerate(row):
                if int(diff) in close:
                    mask |= 1 << index
            result.append(mask)
        return result

    def mass_of(self, subset: int) -> Fraction:
        """Mass of a set of point indices."""
        return sum((self.masses[i] for i in iter_bits(subset)), Fraction(0))


@dataclass(frozen=True)
class AlphaResult:
    """alpha(epsilon); sampled values are lower bounds."""

    epsilon: Fraction
    alpha: Fraction
    mode: str
    witness: tuple[int, ...] | None = None
    family_size: int = 0

    @property
    def lower_bound(self) -> bool:
        """Whether the value only bounds alpha from below."""
        return self.mode == "sampled"

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "epsilon": format_rational(self.epsilon),
            "alpha": format_rational(self.alpha),
            "alpha_float": float(self.alpha),
            "mode": self.mode,
            "lower_bound": self.lower_bound,
            "witness": list(self.witness) if self.witness is not None else None,
            "family_size": self.family_size,
        }


def _epsilon(value: Any) -> Fraction:
    epsilon = parse_rational(value)
    if not epsilon > 0:
        raise InvalidInputError("epsilon must be positive")
    return epsilon


def _doubling(values: Sequence[int], combine: Callable, dtype: Any) -> np.ndarray:
    """Table over all subsets: entry S combines entry S - {top point} with the top point."""
    table = np.zeros(1 << len(values), dtype=dtype)
    for index, value in enumerate(values):
        size = 1 << index
        table[size : 2 * size] = combine(table[:size], value)
    return table


def alpha_exact(space: FiniteSpace, epsilons: Sequence[Any]) -> list[AlphaResult]:
    """alpha(eps) = 1 - min over A with mass >= 1/2 of the mass of {x : d(x, A) < eps}."""
    if space.size > const.ALPHA_EXACT_MAX_POINTS:
        raise LimitExceededError(
            "point count (use alpha_sampled)", space.size, const.ALPHA_EXACT_MAX_POINTS
        )
    scale = lcm_of_denominators(space.masses)
    weights = [int(m * scale) for m in space.masses]
    dtype = np.int64 if scale < 2**62 else object
    mass = _doubling(weights, np.add, dtype)
    eligible = 2 * mass >= scale
    results = []
    for raw in epsilons:
        epsilon = _epsilon(raw)
        balls = _doubling(space.neighborhoods(epsilon), np.bitwise_or, np.int64)
        enlarged = mass[balls]
        candidates = np.where(eligible, enlarged, scale + 1)
        best = int(np.argmin(candidates))
        alpha = 1 - Fraction(int(enlarged[best]), scale)
        results.append(
            AlphaResult(epsilon, alpha, "exact", tuple(iter_bits(best)), int(np.count_nonzero(eligible)))
        )
    LOGGER.debug("alpha_exact swept %d subsets for %d epsilon(s)", len(mass), len(results))
    return results


# ----------------------------------------------------------------------
#  Sampled families
# ----------------------------------------------------------------------
def _level_sets(space: FiniteSpace) -> list[int]:
    if space.selector_values is None:
        return []
    order = np.argsort(space.selector_values, kind="stable")
    cumulative = Fraction(0)
    median = None
    for index in order:
        cumulative += space.masses[int(index)]
        if 2 * cumulative >= 1:
            median = space.selector_values[int(index)]
            break
    below = above = 0
    for index, value in enumerate(space.selector_values):
        if value <= median:
            below |= 1 << index
        if value >= median:
            above |= 1 << index
    return [below, above]


def _cylinders(space: FiniteSpace, coords: Sequence[int], allowed: set[tuple[int, ...]]) -> int:
    mask = 0
    for index, point in enumerate(space.points):
        if tuple(int(point[j]) for j in coords) in allowed:
            mask |= 1 << index
    return mask


def _single_cylinders(space: FiniteSpace, budget: int) -> list[int]:
    found = []
    for j, size in enumerate(space.alphabet_sizes):
        if size > 8:
            continue
        for values in range(1, (1 << size) - 1):
            allowed = {(v,) for v in iter_bits(values)}
            found.append(_cylinders(space, [j], allowed))
            if len(found) >= budget:
                return found
    return found


def _random_cylinders(space: FiniteSpace, budget: int, rng: np.random.Generator) -> list[int]:
    n_coords = len(space.alphabet_sizes)
    found: list[int] = []
    for _ in range(20 * budget):
        if len(found) >= budget or not n_coords:
            break
        width = int(rng.integers(1, min(3, n_coords) + 1))
        coords = sorted(rng.choice(n_coords, size=width, replace=False).tolist())
        cells = [tuple(int(v) for v in cell) for cell in np.ndindex(*(space.alphabet_sizes[j] for j in coords))]
        keep = rng.random(len(cells)) < rng.random()
        allowed = {cell for cell, flag in zip(cells, keep) if flag}
        if allowed:
            found.append(_cylinders(space, coords, allowed))
    return found


def _balls(space: FiniteSpace, budget: int, rng: np.random.Generator) -> list[int]:
    """Smallest closed balls of mass >= 1/2 around sampled centers."""
    matrix = space.distance_matrix()
    centers = range(space.size) if space.size <= budget else rng.choice(space.size, budget, replace=False)
    found = []
    for center in centers:
        row = matrix[int(center)]
        for radius in sorted(set(row)):
            mask = 0
            for index, value in enumerate(row):
                if value <= radius:
                    mask |= 1 << index
            if 2 * space.mass_of(mask) >= 1:
                found.append(mask)
                break
    return found


def alpha_sampled(
    space: FiniteSpace,
    epsilon: Any,
    family_budget: int = const.DEFAULT_FAMILY_BUDGET,
    seed: int = 0,
    extra_sets: Sequence[Sequence[int]] = (),
) -> AlphaResult:
    """Evaluate the alpha expression over a restricted family of sets of mass >= 1/2.

    Restricting the infimum raises it, so the result is a lower bound on alpha.
    """
    if family_budget < 1:
        raise InvalidInputError("family budget must be at least 1")
    epsilon = _epsilon(epsilon)
    rng = spawn_rng(seed, 0)
    candidates = (
        _level_sets(space)
        + _single_cylinders(space, family_budget)
        + _random_cylinders(space, family_budget, rng)
        + _balls(space, family_budget, rng)
    )
    for extra in extra_sets:
        mask = 0
        for index in extra:
            if not 0 <= index < space.size:
                raise InvalidInputError(f"point index {index} out of range")
            mask |= 1 << index
        candidates.append(mask)
    neighborhoods = space.neighborhoods(epsilon)
    best_mass: Fraction | None = None
    best_set = None
    family = 0
    for mask in set(candidates):
        if 2 * space.mass_of(mask) < 1:
            continue
        family += 1
        enlarged = 0
        for index in iter_bits(mask):
            enlarged |= neighborhoods[index]
        value = space.mass_of(enlarged)
        if best_mass is None or value < best_mass:
            best_mass, best_set = value, mask
    if best_mass is None:
        raise InvalidInputError("no candidate set of mass at least 1/2")
    LOGGER.debug("alpha_sampled evaluated %d candidate sets", family)
    return AlphaResult(epsilon, 1 - best_mass, "sampled", tuple(iter_bits(best_set)), family)


def alpha_auto(space: FiniteSpace, epsilons: Sequence[Any], seed: int = 0) -> list[AlphaResult]:
    """Exact when the space is small enough, sampled otherwise."""
    if space.size <= const.ALPHA_EXACT_MAX_POINTS:
        return alpha_exact(space, epsilons)
    return [alpha_sampled(space, epsilon, seed=seed) for epsilon in epsilons]


# ----------------------------------------------------------------------
#  Tails of Lipschitz functions versus alpha
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ConcentrationRow:
    """alpha(r) against the largest tail at r/2 over a Lipschitz family."""

    r: float
    alpha: float
    family_sup: float
    selector_sup: float
    holds: bool


def _tail(values: np.ndarray, probs: np.ndarray, threshold: float) -> float:
    mean = math.fsum(values * probs)
    return math.fsum(probs[values - mean >= threshold - const.FLOAT_COMPARE_TOLERANCE])


def concentration_function_check(
    scenario: Scenario, r_grid: Sequence[float]
) -> list[ConcentrationRow]:
    """Compare exact alpha(r) with sup over 1-Lipschitz f of P(f - Ef >= r/2).

    The family holds the certified built-in selectors and min(d(., A), r) for
    every A of mass >= 1/2.
    """
    space = FiniteSpace.from_scenario(scenario)
    if space.size > const.ALPHA_EXACT_MAX_POINTS:
        raise LimitExceededError("point count", space.size, const.ALPHA_EXACT_MAX_POINTS)
    probs = np.array([float(m) for m in space.masses])
    distances = np.array([[float(v) for v in row] for row in space.distance_matrix()])
    selectors = []
    for selector in Selector:
        point = scenario.point or [0] * scenario.n_coords
        variant = scenario.model_copy(update={"selector": selector, "point": point})
        if variant.certified():
            selectors.append(variant.evaluate(space.points))
    to_set = np.full((space.size, 1 << space.size), np.inf)
    for index in range(space.size):
        size = 1 << index
        to_set[:, size : 2 * size] = np.minimum(to_set[:, :size], distances[:, index][:, None])
    set_mass = np.zeros(1 << space.size)
    for index in range(space.size):
        size = 1 << index
        set_mass[size : 2 * size] = set_mass[:size] + probs[index]
    eligible = set_mass >= 0.5 - const.FLOAT_COMPARE_TOLERANCE

    rows = []
    for r in r_grid:
        alpha = float(alpha_exact(space, [r])[0].alpha)
        truncated = np.minimum(to_set[:, eligible], r)
        means = probs @ truncated
        hits = truncated - means[None, :] >= r / 2 - const.FLOAT_COMPARE_TOLERANCE
        family_sup = float(np.max(probs @ hits)) if hits.size else 0.0
        selector_sup = max((_tail(values, probs, r / 2) for values in selectors), default=0.0)
        best = max(family_sup, selector_sup)
        rows.append(
            ConcentrationRow(r, alpha, best, selector_sup, alpha <= best + const.INEQUALITY_TOLERANCE)
        )
    return rows


# ----------------------------------------------------------------------
#  Covering concentration along refining partitions
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class ProbeRow:
    """One partition of the chain at one epsilon."""

    blocks: int
    epsilon: float
    alpha: float
    alpha_mode: str
    partition_bound: float
    certificate_bound: float

    @property
    def bound(self) -> float:
        """The better of both bounds."""
        return min(self.partition_bound, self.certificate_bound)


@dataclass
class ProbeReport:
    """Evidence for covering concentration; finitely many refinements prove nothing."""

    rows: list[ProbeRow] = field(default_factory=list)
    alpha_non_increasing: dict[str, bool] = field(default_factory=dict)
    note: str = (
        "finite-alphabet surrogate over finitely many refinements; evidence only, not a verdict"
    )

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "rows": [{**vars(row), "bound": row.bound} for row in self.rows],
            "alpha_non_increasing": self.alpha_non_increasing,
            "note": self.note,
        }


def _certificate_bound(phi: Submeasure, partition: Partition, epsilon: float) -> float:
    """Best exp(-t eps^2 / (8 sum w^2)) over covers of the blocks by unions of size <= xi."""
    n_blocks = len(partition)
    ground = GroundSet(n_blocks)
    values: dict[int, Exact] = {
        mask: phi(partition.union_of(mask)) for mask in range(1, 1 << n_blocks)
    }
    top = phi.total()
    base = max(phi(block) for block in partition.blocks)
    best = 1.0
    for xi in sorted({min(base * 2**step, top) for step in range(3)}):
        family = [AtomSet(ground, mask) for mask, value in values.items() if value <= xi]
        if not family:
            continue
        certificate = covering_number(family)
        if certificate.value == 0:
            continue
        norm_sq = math.fsum(count * float(values[entry.mask]) ** 2 for entry, count in certificate.primal)
        if norm_sq == 0:
            return 0.0 if epsilon > 0 else 1.0
        best = min(best, math.exp(-certificate.t * epsilon**2 / (8 * norm_sq)))
    return best


def covering_concentration_probe(
    phi: Submeasure,
    chain: Sequence[Partition],
    epsilons: Sequence[Any],
    seed: int = 0,
) -> ProbeReport:
    """alpha of ({0,1}^B, delta_{phi,B}, uniform) along a refining chain, with bounds."""
    if not chain:
        raise InvalidInputError("the partition chain is empty")
    for coarse, fine in zip(chain, chain[1:]):
        if not fine.finer_than(coarse):
            raise InvalidInputError("each partition must refine the previous one")
    report = ProbeReport()
    for partition in chain:
        space = FiniteSpace.block_space(phi, partition)
        alphas = alpha_auto(space, epsilons, seed=seed)
        block_weights = [float(phi(block)) for block in partition.blocks]
        for result in alphas:
            epsilon = float(result.epsilon)
            report.rows.append(
                ProbeRow(
                    blocks=len(partition),
                    epsilon=epsilon,
                    alpha=float(result.alpha),
                    alpha_mode=result.mode,
                    partition_bound=tail_bound(1, block_weights, epsilon).concentration,
                    certificate_bound=_certificate_bound(phi, partition, epsilon),
                )
            )
    for raw in epsilons:
        epsilon = float(_epsilon(raw))
        series = [row.alpha for row in report.rows if row.epsilon == epsilon]
        report.alpha_non_increasing[repr(epsilon)] = all(
            later <= earlier + const.INEQUALITY_TOLERANCE for earlier, later in zip(series, series[1:])
        )
    LOGGER.warning("Covering concentration probe: %s", report.note)
    return report
