"""Discrete entropy and the inequalities behind covering concentration."""
from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations

import numpy as np
from scipy.special import xlogy

from submeasure_lab import const
from submeasure_lab.algebra import Cover, GroundSet, covering_multiplicity, is_uniform
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError, NonUniformCoverError
from submeasure_lab.utils import iter_bits, spawn_rng

LOGGER = logging.getLogger(__name__)

UNIFORM_COVER_MAX_COORDS = 4


@dataclass(frozen=True)
class FiniteDist:
    """A probability vector on {0, ..., size - 1}."""

    probabilities: np.ndarray

    def __post_init__(self):
        """Validate normalization."""
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidInputError("a distribution needs a non-empty 1-d probability vector")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidInputError("probabilities must be finite and non-negative")
        if abs(math.fsum(probs) - 1) > const.NORMALIZATION_TOLERANCE:
            raise InvalidInputError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    @property
    def size(self) -> int:
        """Support size."""
        return int(self.probabilities.size)

    @classmethod
    def uniform(cls, size: int) -> FiniteDist:
        """Uniform distribution."""
        if size < 1:
            raise InvalidInputError("size must be positive")
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> FiniteDist:
        """Normalize non-negative weights."""
        values = np.asarray(weights, dtype=float)
        total = math.fsum(values)
        if np.any(values < 0) or total <= 0:
            raise InvalidInputError("weights must be non-negative with positive sum")
        return cls(values / total)

    @classmethod
    def random(cls, size: int, rng: np.random.Generator) -> FiniteDist:
        """Draw from the flat Dirichlet distribution."""
        return cls(rng.dirichlet(np.ones(size)))


@dataclass(frozen=True)
class ProductDist:
    """Product of finite distributions, one per coordinate."""

    factors: tuple[FiniteDist, ...]

    def __post_init__(self):
        """Validate."""
        factors = tuple(self.factors)
        if not factors:
            raise InvalidInputError("a product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def shape(self) -> tuple[int, ...]:
        """Alphabet sizes."""
        return tuple(factor.size for factor in self.factors)

    def joint(self) -> np.ndarray:
        """Joint probabilities as an array of the product shape."""
        return reduce(np.multiply.outer, (factor.probabilities for factor in self.factors))

    def marginal(self, indices: Sequence[int]) -> ProductDist:
        """The product of the selected factors."""
        return ProductDist(tuple(self.factors[index] for index in indices))


def _weights(mu: FiniteDist | ProductDist | np.ndarray) -> np.ndarray:
    if isinstance(mu, FiniteDist):
        return mu.probabilities
    if isinstance(mu, ProductDist):
        return mu.joint()
    return np.asarray(mu, dtype=float)


def _ent_rows(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Entropy of each row of values against probs."""
    means = values @ probs
    return xlogy(values, values) @ probs - xlogy(means, means)


def ent(f: np.ndarray, mu: FiniteDist | ProductDist | np.ndarray) -> float:
    """Ent_mu(f) = E[f ln f] - E[f] ln E[f], with 0 ln 0 = 0."""
    values = np.asarray(f, dtype=float)
    probs = _weights(mu)
    if values.shape != probs.shape:
        raise InvalidInputError(f"function shape {values.shape} does not match {probs.shape}")
    if np.any(values < 0):
        raise InvalidInputError("entropy needs a non-negative function")
    flat_f, flat_p = values.ravel(), probs.ravel()
    mean = math.fsum(flat_f * flat_p)
    if mean == 0:
        return 0.0
    return math.fsum(xlogy(flat_f, flat_f) * flat_p) - mean * math.log(mean)


def conditional_entropy_integral(
    f: np.ndarray, dist: ProductDist, block: Sequence[int]
) -> float:
    """Integral over z of Ent_{P_C}(f_z), the coordinates outside C frozen at z."""
    values = np.asarray(f, dtype=float)
    if values.shape != dist.shape:
        raise InvalidInputError(f"function shape {values.shape} does not match {dist.shape}")
    inside = sorted(set(block))
    outside = [axis for axis in range(len(dist.factors)) if axis not in inside]
    if not inside:
        return 0.0
    moved = np.transpose(values, outside + inside)
    n_outside = math.prod(dist.shape[axis] for axis in outside)
    table = moved.reshape(n_outside, -1)
    inner = dist.marginal(inside).joint().ravel()
    outer = dist.marginal(outside).joint().ravel() if outside else np.ones(1)
    return math.fsum(outer * _ent_rows(table, inner))


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of an inequality lhs <= rhs."""

    lhs: float
    rhs: float
    slack: float

    @property
    def holds(self) -> bool:
        """Whether lhs <= rhs up to the inequality tolerance."""
        return self.slack >= -const.INEQUALITY_TOLERANCE

    def to_json(self) -> dict:
        """Serialize."""
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "holds": self.holds}


def shearer_check(
    f: np.ndarray, dist: ProductDist, cover: Cover, k: int | None = None
) -> InequalityCheck:
    """Ent(f) <= (1/k) sum_i integral of Ent_{P_{C_i}}(f_z) for a uniform k-cover."""
    if cover.ground.n_atoms != len(dist.factors):
        raise InvalidInputError("cover and product have different index sets")
    if not is_uniform(cover):
        raise NonUniformCoverError("the cover does not hit every coordinate equally often")
    multiplicity = covering_multiplicity(cover)
    if k is not None and k != multiplicity:
        raise InvalidInputError(f"cover multiplicity is {multiplicity}, not {k}")
    values = np.asarray(f, dtype=float)
    if np.any(values < 0):
        raise InvalidInputError("entropy needs a non-negative function")
    everything = range(len(dist.factors))
    lhs = conditional_entropy_integral(values, dist, everything)
    rhs = (
        math.fsum(conditional_entropy_integral(values, dist, entry.indices()) for entry in cover.sets)
        / multiplicity
    )
    return InequalityCheck(lhs, rhs, rhs - lhs)


def ledoux_check(f: np.ndarray, mu: FiniteDist | np.ndarray) -> InequalityCheck:
    """Ent(e^f) <= sum over f(x) >= f(y) of (f(x) - f(y))^2 e^f(x) mu(x) mu(y)."""
    values = np.asarray(f, dtype=float).ravel()
    probs = _weights(mu).ravel()
    if values.shape != probs.shape:
        raise InvalidInputError("function and distribution sizes differ")
    lhs = ent(np.exp(values), probs)
    gaps = values[:, None] - values[None, :]
    terms = np.where(gaps >= 0, gaps**2 * np.exp(values)[:, None], 0.0) * np.outer(probs, probs)
    rhs = math.fsum(terms.ravel())
    return InequalityCheck(lhs, rhs, rhs - lhs)


# ----------------------------------------------------------------------
#  Herbst argument and Markov's inequality
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class HerbstRow:
    """One lambda of the Herbst chain."""

    lam: float
    hypothesis: bool
    hypothesis_on_interval: bool
    mgf: float
    mgf_bound: float
    conclusion: bool
    jensen: bool


@dataclass(frozen=True)
class TailRow:
    """One r of the Markov step."""

    r: float
    tail: float
    bound: float
    hypothesis_on_interval: bool
    conclusion: bool


@dataclass
class HerbstReport:
    """Rows of the chain; failures count hypothesis-holds-but-conclusion-fails events."""

    mean: float
    variance_bound: float
    lambda_rows: list[HerbstRow] = field(default_factory=list)
    tail_rows: list[TailRow] = field(default_factory=list)

    @property
    def failures(self) -> int:
        """Number of broken implications."""
        return sum(
            1 for row in self.lambda_rows if row.hypothesis_on_interval and not row.conclusion
        ) + sum(1 for row in self.tail_rows if row.hypothesis_on_interval and not row.conclusion)

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "mean": self.mean,
            "D": self.variance_bound,
            "failures": self.failures,
            "lambda_rows": [vars(row) for row in self.lambda_rows],
            "tail_rows": [vars(row) for row in self.tail_rows],
        }


class _Herbst:
    """Centered moment generating function of f under fixed probabilities."""

    def __init__(self, values: np.ndarray, probs: np.ndarray, bound: float):
        self.probs = probs
        self.mean = math.fsum(values * probs)
        self.centered = values - self.mean
        self.bound = bound

    def mgf(self, lam: float) -> float:
        return math.fsum(np.exp(lam * self.centered) * self.probs)

    def hypothesis(self, lam: float) -> bool:
        # Ent(e^{lam f}) <= lam^2 D / 2 E[e^{lam f}], both sides scaled by e^{-lam Ef}
        shifted = np.exp(lam * self.centered)
        mgf = math.fsum(shifted * self.probs)
        allowed = lam * lam * self.bound / 2 * mgf
        return ent(shifted, self.probs) <= allowed + const.INEQUALITY_TOLERANCE * max(1.0, allowed)

    def hypothesis_on(self, top: float, points: int = 200) -> bool:
        grid = np.linspace(0.0, top, points + 1)[1:]
        return all(self.hypothesis(float(lam)) for lam in grid)


def herbst_chain_check(
    f: np.ndarray,
    dist: ProductDist | FiniteDist | np.ndarray,
    variance_bound: float,
    lambda_grid: Sequence[float],
    r_grid: Sequence[float],
) -> HerbstReport:
    """Walk entropy bound, moment bound and tail bound on the given grids.

    The hypothesis is taken as holding on [0, lambda] when it holds on a
    200-point grid of the interval.
    """
    if not variance_bound > 0:
        raise InvalidInputError("D must be positive")
    values = np.asarray(f, dtype=float).ravel()
    probs = _weights(dist).ravel()
    if values.shape != probs.shape:
        raise InvalidInputError("function and distribution sizes differ")
    chain = _Herbst(values, probs, variance_bound)
    report = HerbstReport(mean=chain.mean, variance_bound=variance_bound)
    for lam in lambda_grid:
        lam = float(lam)
        if lam <= 0:
            raise InvalidInputError("lambda values must be positive")
        mgf = chain.mgf(lam)
        mgf_bound = math.exp(lam * lam * variance_bound / 2)
        report.lambda_rows.append(
            HerbstRow(
                lam=lam,
                hypothesis=chain.hypothesis(lam),
                hypothesis_on_interval=chain.hypothesis_on(lam),
                mgf=mgf,
                mgf_bound=mgf_bound,
                conclusion=mgf <= mgf_bound * (1 + const.INEQUALITY_TOLERANCE),
                jensen=mgf >= 1 - const.INEQUALITY_TOLERANCE,
            )
        )
    for r in r_grid:
        r = float(r)
        if r <= 0:
            raise InvalidInputError("r values must be positive")
        tail = math.fsum(probs[chain.centered >= r - const.FLOAT_COMPARE_TOLERANCE])
        bound = math.exp(-r * r / (2 * variance_bound))
        report.tail_rows.append(
            TailRow(
                r=r,
                tail=tail,
                bound=bound,
                hypothesis_on_interval=chain.hypothesis_on(r / variance_bound),
                conclusion=tail <= bound + const.INEQUALITY_TOLERANCE,
            )
        )
    if report.failures:
        LOGGER.error("Herbst chain broke %d implication(s)", report.failures)
    return report


@dataclass(frozen=True)
class TailBound:
    """exp(-k r^2 / 4|w|^2) for Lipschitz tails, exp(-k r^2 / 8|w|^2) for the concentration function."""

    lipschitz: float
    concentration: float
    trivial: bool = False


def tail_bound(k: int, weights: Sequence[float], r: float) -> TailBound:
    """Evaluate both covering concentration bounds."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if not r > 0:
        raise InvalidInputError("r must be positive")
    norm_sq = math.fsum(float(w) ** 2 for w in weights)
    if norm_sq == 0:
        return TailBound(1.0, 1.0, trivial=True)
    return TailBound(
        lipschitz=math.exp(-k * r * r / (4 * norm_sq)),
        concentration=math.exp(-k * r * r / (8 * norm_sq)),
    )


# ----------------------------------------------------------------------
#  Random suites
# ----------------------------------------------------------------------
def uniform_covers(n_coords: int) -> Iterator[Cover]:
    """Yield every family of distinct non-empty subsets that is a uniform cover."""
    if n_coords > UNIFORM_COVER_MAX_COORDS:
        raise LimitExceededError("coordinate count", n_coords, UNIFORM_COVER_MAX_COORDS)
    ground = GroundSet(n_coords)
    subsets = list(range(1, 1 << n_coords))
    for family in range(1, 1 << len(subsets)):
        masks = [subsets[i] for i in range(len(subsets)) if family >> i & 1]
        hits = [sum(mask >> atom & 1 for mask in masks) for atom in range(n_coords)]
        if hits[0] and len(set(hits)) == 1:
            yield Cover(tuple(ground.atom_set(iter_bits(mask)) for mask in masks))


def _random_function(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    values = rng.random(shape) * 2
    values[rng.random(shape) < 0.2] = 0.0
    return values


@dataclass(frozen=True)
class SuiteResult:
    """Smallest slack over a batch of random instances."""

    checks: int
    min_slack: float
    violations: int

    def to_json(self) -> dict:
        """Serialize."""
        return {"checks": self.checks, "min_slack": self.min_slack, "violations": self.violations}


def random_shearer_suite(
    n_coords: int,
    alphabet: int,
    instances: int,
    seed: int,
    covers: Sequence[Cover] | None = None,
) -> SuiteResult:
    """Run shearer_check on random (f, dist) for every given (default: every) uniform cover."""
    covers = list(covers) if covers is not None else list(uniform_covers(n_coords))
    rng = spawn_rng(seed, 0)
    shape = (alphabet,) * n_coords
    checks, violations, min_slack = 0, 0, math.inf
    for _ in range(instances):
        dist = ProductDist(tuple(FiniteDist.random(alphabet, rng) for _ in range(n_coords)))
        values = _random_function(shape, rng)
        for cover in covers:
            result = shearer_check(values, dist, cover)
            checks += 1
            min_slack = min(min_slack, result.slack)
            violations += not result.holds
    LOGGER.info("Shearer suite: %d checks over %d covers, min slack %.3g", checks, len(covers), min_slack)
    return SuiteResult(checks, min_slack, violations)


def random_ledoux_suite(points: int, instances: int, seed: int) -> SuiteResult:
    """Run ledoux_check on random real f and random distributions."""
    rng = spawn_rng(seed, 1)
    checks, violations, min_slack = 0, 0, math.inf
    for _ in range(instances):
        mu = FiniteDist.random(points, rng)
        result = ledoux_check(rng.normal(0.0, 1.5, points), mu)
        checks += 1
        min_slack = min(min_slack, result.slack)
        violations += not result.holds
    LOGGER.info("Ledoux suite: %d checks, min slack %.3g", checks, min_slack)
    return SuiteResult(checks, min_slack, violations)


def combinations_cover(n_coords: int, size: int) -> Cover:
    """All size-subsets of the coordinates, a uniform cover."""
    ground = GroundSet(n_coords)
    return Cover(tuple(ground.atom_set(combo) for combo in combinations(range(n_coords), size)))
