"""Weighted-cover and block pseudo-metrics on finite products."""
from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from submeasure_lab.algebra import AtomSet, Cover, Partition, min_weight_cover
from submeasure_lab.exact import Exact, exact_sum
from submeasure_lab.exceptions import InfeasibleCoverError, InvalidInputError
from submeasure_lab.submeasure import Submeasure

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductPoint:
    """A point of a finite product, coordinate j taking values below alphabet_sizes[j]."""

    coords: tuple[int, ...]
    alphabet_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        """Validate coordinates against the alphabets."""
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if self.alphabet_sizes is not None:
            sizes = tuple(int(s) for s in self.alphabet_sizes)
            if len(sizes) != len(coords):
                raise InvalidInputError("point length does not match the alphabets")
            for index, (value, size) in enumerate(zip(coords, sizes)):
                if not 0 <= value < size:
                    raise InvalidInputError(f"coordinate {index} = {value} outside alphabet {size}")
            object.__setattr__(self, "alphabet_sizes", sizes)

    def __len__(self) -> int:
        """Number of coordinates."""
        return len(self.coords)


def _coords(point: ProductPoint | Sequence[int] | np.ndarray) -> Sequence[int]:
    if isinstance(point, ProductPoint):
        return point.coords
    return [int(value) for value in point]


def difference_set(x: Any, y: Any) -> int:
    """Bit mask of the coordinates where x and y differ."""
    left, right = _coords(x), _coords(y)
    if len(left) != len(right):
        raise InvalidInputError(f"points of length {len(left)} and {len(right)} differ in index set")
    mask = 0
    for index, (a, b) in enumerate(zip(left, right)):
        if a != b:
            mask |= 1 << index
    return mask


def normalized_hamming(x: Any, y: Any) -> Fraction:
    """Fraction of coordinates where x and y differ."""
    length = len(_coords(x))
    if length == 0:
        raise InvalidInputError("points must have at least one coordinate")
    return Fraction(difference_set(x, y).bit_count(), length)


def dist_cover(x: Any, y: Any, cover: Cover) -> Exact:
    """d_{C,w}(x, y): least weight of cover entries containing the difference set."""
    mask = difference_set(x, y)
    if len(_coords(x)) != cover.ground.n_atoms:
        raise InvalidInputError("points and cover have different index sets")
    result = min_weight_cover(AtomSet(cover.ground, mask), cover)
    if not result.feasible:
        raise InfeasibleCoverError("the cover does not contain the difference set")
    return result.weight


def dist_blocks(x: Any, y: Any, phi: Submeasure, partition: Partition) -> Exact:
    """delta_{phi,B}(x, y) = phi(union of the blocks where x and y differ)."""
    if len(_coords(x)) != len(partition):
        raise InvalidInputError("points must be indexed by the partition blocks")
    if partition.ground != phi.ground:
        raise InvalidInputError("partition and submeasure live on different ground sets")
    return phi(partition.union_of(difference_set(x, y)))


class CoverMetric:
    """Callable d_{C,w} with distances cached per difference set."""

    def __init__(self, cover: Cover, exact: bool = True):
        """Initialize with a weighted cover."""
        self.cover = cover
        self.weights = cover.require_weights()
        self.exact = exact
        self.n_coords = cover.ground.n_atoms
        self._partition = cover.is_partition()
        self._cache: dict[int, Exact] = {0: Fraction(0)}

    def by_mask(self, mask: int) -> Exact | float:
        """Distance for a difference set."""
        value = self._cache.get(mask)
        if value is None:
            if self._partition:
                value = exact_sum(
                    weight
                    for weight, block in zip(self.weights, self.cover.masks)
                    if block & mask
                )
            else:
                result = min_weight_cover(AtomSet(self.cover.ground, mask), self.cover)
                if not result.feasible:
                    raise InfeasibleCoverError("the cover does not contain the difference set")
                value = result.weight
            self._cache[mask] = value
        return value if self.exact else float(value)

    def __call__(self, x: Any, y: Any) -> Exact | float:
        """Distance between two points."""
        if len(_coords(x)) != self.n_coords:
            raise InvalidInputError("points and cover have different index sets")
        return self.by_mask(difference_set(x, y))


class BlockMetric:
    """Callable delta_{phi,B} with distances cached per set of differing blocks."""

    def __init__(self, phi: Submeasure, partition: Partition, exact: bool = True):
        """Initialize with a submeasure and a partition of its ground set."""
        if partition.ground != phi.ground:
            raise InvalidInputError("partition and submeasure live on different ground sets")
        self.phi = phi
        self.partition = partition
        self.exact = exact
        self.n_coords = len(partition)
        self._cache: dict[int, Exact] = {}

    def by_mask(self, block_mask: int) -> Exact | float:
        """Distance for a set of differing blocks."""
        value = self._cache.get(block_mask)
        if value is None:
            value = self.phi(self.partition.union_of(block_mask))
            self._cache[block_mask] = value
        return value if self.exact else float(value)

    def __call__(self, x: Any, y: Any) -> Exact | float:
        """Distance between two block-indexed points."""
        if len(_coords(x)) != self.n_coords:
            raise InvalidInputError("points must be indexed by the partition blocks")
        return self.by_mask(difference_set(x, y))

    def dominating_cover(self) -> Cover:
        """The block cover weighted by phi of each block; its metric dominates this one."""
        return self.partition.as_cover(self.phi(block) for block in self.partition.blocks)


def _pack(differs: np.ndarray) -> np.ndarray:
    """Pack a boolean array along its last axis into integer masks (object dtype)."""
    width = differs.shape[-1]
    if width < 63:
        bits = np.left_shift(np.int64(1), np.arange(width, dtype=np.int64))
        return (differs.astype(np.int64) @ bits).astype(object)
    bits = np.array([1 << j for j in range(width)], dtype=object)
    return differs.astype(object) @ bits


def masks_against(points: np.ndarray, reference: Sequence[int]) -> np.ndarray:
    """Difference mask of every row against one reference point."""
    points = np.atleast_2d(np.asarray(points))
    reference = np.asarray(reference)
    if points.shape[1] != reference.shape[0]:
        raise InvalidInputError("points and reference have different index sets")
    return _pack(points != reference[None, :])


def difference_masks(points: np.ndarray) -> np.ndarray:
    """Pairwise difference masks of the rows of an integer array (object dtype)."""
    points = np.asarray(points)
    if points.ndim != 2:
        raise InvalidInputError("points must form a 2-d array")
    return _pack(points[:, None, :] != points[None, :, :])


def pairwise_within(
    points: np.ndarray, metric: Callable[[Any, Any], Any], epsilon: Any
) -> np.ndarray:
    """Boolean matrix of d(x_i, x_j) < epsilon, one metric call per distinct difference set."""
    masks = difference_masks(points)
    by_mask = getattr(metric, "by_mask", None)
    rows = np.asarray(points)
    verdicts: dict[int, bool] = {}
    result = np.zeros(masks.shape, dtype=bool)
    for i in range(masks.shape[0]):
        for j in range(masks.shape[1]):
            mask = int(masks[i, j])
            if mask not in verdicts:
                distance = by_mask(mask) if by_mask is not None else metric(rows[i], rows[j])
                verdicts[mask] = distance < epsilon
            result[i, j] = verdicts[mask]
    LOGGER.debug("pairwise_within: %d distinct difference sets", len(verdicts))
    return result
