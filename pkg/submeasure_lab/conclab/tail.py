"""Scenarios and Monte Carlo tails against the covering concentration bound."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from typing import Annotated

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    PlainSerializer,
    field_validator,
    model_validator,
)
from scipy.stats import binom

from submeasure_lab import const
from submeasure_lab.algebra import Cover, GroundSet, covering_multiplicity
from submeasure_lab.entropy import FiniteDist, ProductDist, tail_bound
from submeasure_lab.exact import RATIONAL_JSON_SCHEMA, PublishedSchema
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.metric import CoverMetric, masks_against
from submeasure_lab.utils import format_rational, parse_rational, resolve_threads, spawn_rng, wilson_interval

LOGGER = logging.getLogger(__name__)

Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    PublishedSchema(RATIONAL_JSON_SCHEMA),
]


class Selector(StrEnum):
    """Built-in 1-Lipschitz functions."""

    COORDINATE_MEAN = "coordinate_mean"
    WEIGHTED_SUM = "weighted_sum"
    DISTANCE_TO_POINT = "distance_to_point"


class Mode(StrEnum):
    """bound: only certified selectors; explore: anything goes."""

    BOUND = "bound"
    EXPLORE = "explore"


class Scenario(BaseModel):
    """A finite product space with a weighted cover and a test function."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alphabet_sizes: list[int]
    probabilities: list[list[Rational]] | None = None
    cover: list[list[int]] | None = None
    weights: list[Rational] | None = None
    selector: Selector = Selector.COORDINATE_MEAN
    point: list[int] | None = None
    r_grid: list[float] = [0.1, 0.2, 0.3]
    trials: int = 10_000
    seed: int = 0
    mode: Mode = Mode.BOUND
    epsilons: list[float] = []

    @field_validator("alphabet_sizes")
    @classmethod
    def _check_alphabets(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("at least one coordinate is needed")
        if any(size < 2 for size in value):
            raise ValueError("every alphabet needs at least two letters")
        return value

    @field_validator("trials")
    @classmethod
    def _check_trials(cls, value: int) -> int:
        if value < const.MIN_MC_TRIALS:
            raise ValueError(f"at least {const.MIN_MC_TRIALS} trials are needed")
        return value

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if not 0 <= value < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value

    @field_validator("r_grid", "epsilons")
    @classmethod
    def _check_positive(cls, value: list[float]) -> list[float]:
        if any(not item > 0 or not math.isfinite(item) for item in value):
            raise ValueError("grid values must be finite and positive")
        return value

    @model_validator(mode="after")
    def _check_shapes(self) -> Scenario:
        n_coords = len(self.alphabet_sizes)
        if self.probabilities is not None:
            if len(self.probabilities) != n_coords:
                raise ValueError("one probability vector per coordinate is needed")
            for row, size in zip(self.probabilities, self.alphabet_sizes):
                if len(row) != size or any(p < 0 for p in row) or sum(row) != 1:
                    raise ValueError("each probability vector must match its alphabet and sum to 1")
        if self.cover is not None:
            covered = set()
            for entry in self.cover:
                if not entry or any(not 0 <= j < n_coords for j in entry):
                    raise ValueError("cover entries must be non-empty index lists")
                covered.update(entry)
            if len(covered) != n_coords:
                raise ValueError("the cover must contain every coordinate")
        entries = len(self.cover) if self.cover is not None else n_coords
        if self.weights is not None:
            if len(self.weights) != entries:
                raise ValueError(f"{len(self.weights)} weights given for {entries} cover entries")
            if any(w < 0 for w in self.weights):
                raise ValueError("weights must be non-negative")
        if self.point is not None:
            if len(self.point) != n_coords or any(
                not 0 <= v < s for v, s in zip(self.point, self.alphabet_sizes)
            ):
                raise ValueError("point must lie in the product")
        elif self.selector == Selector.DISTANCE_TO_POINT:
            raise ValueError("distance_to_point needs a point")
        return self

    # ------------------------------------------------------------------
    @property
    def n_coords(self) -> int:
        """Number of coordinates."""
        return len(self.alphabet_sizes)

    @cached_property
    def probability_rows(self) -> list[list[Fraction]]:
        """Exact per-coordinate probabilities (uniform by default)."""
        if self.probabilities is not None:
            return [list(row) for row in self.probabilities]
        return [[Fraction(1, size)] * size for size in self.alphabet_sizes]

    @cached_property
    def weighted_cover(self) -> Cover:
        """The cover with its weights (singletons with weight 1/n by default)."""
        ground = GroundSet(self.n_coords)
        entries = self.cover if self.cover is not None else [[j] for j in range(self.n_coords)]
        weights = self.weights or [Fraction(1, self.n_coords)] * len(entries)
        return Cover.from_indices(ground, entries, weights)

    @property
    def multiplicity(self) -> int:
        """k, the covering multiplicity."""
        return covering_multiplicity(self.weighted_cover)

    @property
    def weight_norm_sq(self) -> Fraction:
        """Squared Euclidean norm of the weights."""
        return sum((w * w for w in self.weighted_cover.require_weights()), Fraction(0))

    def product_dist(self) -> ProductDist:
        """Floating-point product distribution."""
        return ProductDist(
            tuple(FiniteDist(np.array([float(p) for p in row])) for row in self.probability_rows)
        )

    @cached_property
    def metric(self) -> CoverMetric:
        """d_{C,w} in floating point."""
        return CoverMetric(self.weighted_cover, exact=False)

    @cached_property
    def exact_metric(self) -> CoverMetric:
        """d_{C,w} in exact arithmetic."""
        return CoverMetric(self.weighted_cover)

    @cached_property
    def coefficients(self) -> list[Fraction]:
        """c_j = min over entries i containing j of w_i / |C_i|."""
        cover = self.weighted_cover
        result = []
        for j in range(self.n_coords):
            result.append(
                min(
                    w / len(entry)
                    for entry, w in zip(cover.sets, cover.require_weights())
                    if j in entry
                )
            )
        return result

    def certified(self) -> bool:
        """Whether the selector is 1-Lipschitz for d_{C,w}."""
        if self.selector == Selector.COORDINATE_MEAN:
            return all(c * self.n_coords >= 1 for c in self.coefficients)
        return True

    def _scaled(self, samples: np.ndarray) -> np.ndarray:
        return samples / (np.asarray(self.alphabet_sizes, dtype=float) - 1)

    def evaluate(self, samples: np.ndarray) -> np.ndarray:
        """Apply the selector to the rows of an integer sample array."""
        samples = np.atleast_2d(samples)
        if self.selector == Selector.COORDINATE_MEAN:
            return self._scaled(samples).mean(axis=1)
        if self.selector == Selector.WEIGHTED_SUM:
            return self._scaled(samples) @ np.array([float(c) for c in self.coefficients])
        masks = masks_against(samples, self.point)
        distances = {int(mask): self.metric.by_mask(int(mask)) for mask in set(masks.tolist())}
        return np.array([distances[int(mask)] for mask in masks], dtype=float)

    def exact_expectation(self) -> Fraction | None:
        """E[f] for the linear selectors, None otherwise."""
        if self.selector == Selector.DISTANCE_TO_POINT:
            return None
        means = [
            sum((value * p for value, p in enumerate(row)), Fraction(0)) / (size - 1)
            for row, size in zip(self.probability_rows, self.alphabet_sizes)
        ]
        if self.selector == Selector.COORDINATE_MEAN:
            return sum(means, Fraction(0)) / self.n_coords
        return sum((c * m for c, m in zip(self.coefficients, means)), Fraction(0))


# ----------------------------------------------------------------------
#  Monte Carlo
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class TailRow:
    """Empirical tail at r with its Wilson interval and the theoretical bound."""

    r: float
    empirical: float
    ci_lo: float
    ci_hi: float
    bound: float

    def as_csv(self) -> list[str]:
        """CSV cells with exact float formatting."""
        return [repr(self.r), repr(self.empirical), repr(self.ci_lo), repr(self.ci_hi), repr(self.bound)]


@dataclass
class TailReport:
    """Result of mc_tail."""

    seed: int
    trials: int
    k: int
    weight_norm_sq: float
    mean: float
    mean_source: str
    certified: bool
    generator: str = const.RNG_NAME
    rows: list[TailRow] = field(default_factory=list)

    csv_header = ("r", "empirical", "ci_lo", "ci_hi", "bound")

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "seed": self.seed,
            "generator": self.generator,
            "trials": self.trials,
            "k": self.k,
            "weight_norm_sq": self.weight_norm_sq,
            "mean": self.mean,
            "mean_source": self.mean_source,
            "certified": self.certified,
            "rows": [vars(row) for row in self.rows],
        }


def sample_product(
    scenario: Scenario, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw count product points by inverse-CDF sampling, one column per coordinate."""
    uniforms = rng.random((count, scenario.n_coords))
    samples = np.empty((count, scenario.n_coords), dtype=np.int64)
    for j, row in enumerate(scenario.probability_rows):
        cdf = np.cumsum([float(p) for p in row])
        samples[:, j] = np.minimum(np.searchsorted(cdf, uniforms[:, j], side="right"), len(row) - 1)
    return samples


def mc_tail(
    scenario: Scenario,
    threads: int | None = None,
    trial_cap: int = const.DEFAULT_TRIAL_CAP,
    function: Callable[[np.ndarray], np.ndarray] | None = None,
) -> TailReport:
    """Estimate P(f - E f >= r) and compare with exp(-k r^2 / 4|w|^2).

    Chunk c draws from its own stream (seed, c), so results do not depend on
    the number of workers.
    """
    if scenario.trials > trial_cap:
        raise LimitExceededError("trial count", scenario.trials, trial_cap)
    if function is not None and scenario.mode != Mode.EXPLORE:
        raise InvalidInputError("custom functions are only allowed in explore mode")
    certified = function is None and scenario.certified()
    if not certified and scenario.mode == Mode.BOUND:
        raise InvalidInputError(
            f"selector {scenario.selector} is not certified 1-Lipschitz for this cover"
        )
    evaluate = function or scenario.evaluate

    chunks = [
        (index, min(const.MC_CHUNK_SIZE, scenario.trials - start))
        for index, start in enumerate(range(0, scenario.trials, const.MC_CHUNK_SIZE))
    ]

    def run_chunk(chunk: tuple[int, int]) -> np.ndarray:
        index, count = chunk
        return np.asarray(
            evaluate(sample_product(scenario, count, spawn_rng(scenario.seed, index))), dtype=float
        )

    workers = min(resolve_threads(threads), len(chunks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.concatenate(list(pool.map(run_chunk, chunks)))
    else:
        values = np.concatenate([run_chunk(chunk) for chunk in chunks])

    exact_mean = scenario.exact_expectation() if function is None else None
    mean = float(exact_mean) if exact_mean is not None else math.fsum(values) / len(values)
    k = scenario.multiplicity
    norm_sq = scenario.weight_norm_sq
    report = TailReport(
        seed=scenario.seed,
        trials=scenario.trials,
        k=k,
        weight_norm_sq=float(norm_sq),
        mean=mean,
        mean_source="exact" if exact_mean is not None else "empirical",
        certified=certified,
    )
    centered = values - mean
    for r in scenario.r_grid:
        hits = int(np.count_nonzero(centered >= r - const.FLOAT_COMPARE_TOLERANCE))
        low, high = wilson_interval(hits, len(values))
        bound = tail_bound(k, [float(w) for w in scenario.weighted_cover.require_weights()], r)
        report.rows.append(TailRow(r, hits / len(values), low, high, bound.lipschitz))
    LOGGER.info(
        "Monte Carlo tail: %d trials in %d chunk(s) on %d worker(s)",
        scenario.trials,
        len(chunks),
        workers,
    )
    return report


def exact_binomial_tail(n: int, p: float, threshold: float) -> float:
    """P(Bin(n, p) >= threshold)."""
    return float(binom.sf(math.ceil(threshold) - 1, n, p))


def fair_bits_scenario(n_coords: int, trials: int, seed: int, r_grid: list[float]) -> Scenario:
    """n fair bits, singleton cover with weights 1/n, coordinate mean."""
    return Scenario(
        alphabet_sizes=[2] * n_coords, trials=trials, seed=seed, r_grid=r_grid
    )


def enumerate_points(scenario: Scenario) -> tuple[np.ndarray, list[Fraction]]:
    """All product points with their exact masses."""
    total = math.prod(scenario.alphabet_sizes)
    if total > const.ALPHA_SAMPLED_MAX_POINTS:
        raise LimitExceededError("product size", total, const.ALPHA_SAMPLED_MAX_POINTS)
    points = np.array(np.unravel_index(np.arange(total), scenario.alphabet_sizes)).T
    masses = []
    for point in points:
        mass = Fraction(1)
        for j, value in enumerate(point):
            mass *= scenario.probability_rows[j][int(value)]
        masses.append(mass)
    return points, masses
