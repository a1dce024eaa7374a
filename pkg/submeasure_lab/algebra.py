"""Finite Boolean set algebras: atoms, covers, partitions and exact min-weight covers."""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from submeasure_lab import const
from submeasure_lab.exact import Exact, exact_sum, to_exact
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.utils import iter_bits, mask_of

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundSet:
    """The atoms 0..n_atoms-1 of a finite set algebra."""

    n_atoms: int

    def __post_init__(self):
        """Validate the atom count."""
        if isinstance(self.n_atoms, bool) or not isinstance(self.n_atoms, int):
            raise InvalidInputError(f"n_atoms must be an integer, got {self.n_atoms!r}")
        if self.n_atoms < 1:
            raise InvalidInputError(f"n_atoms must be positive, got {self.n_atoms}")

    @property
    def full_mask(self) -> int:
        """Bit mask of every atom."""
        return (1 << self.n_atoms) - 1

    def full(self) -> AtomSet:
        """Return the whole ground set."""
        return AtomSet(self, self.full_mask)

    def empty(self) -> AtomSet:
        """Return the empty set."""
        return AtomSet(self, 0)

    def atom_set(self, indices: Iterable[int]) -> AtomSet:
        """Return the set of the given atoms."""
        return AtomSet(self, mask_of(indices))

    def singleton(self, atom: int) -> AtomSet:
        """Return {atom}."""
        return AtomSet(self, 1 << atom)

    def check_enumerable(self, limit: int = const.DEFAULT_MAX_ATOMS) -> None:
        """Raise if enumerating all subsets would exceed the atom limit."""
        if self.n_atoms > limit:
            raise LimitExceededError("atom count", self.n_atoms, limit)

    def subsets(self, limit: int = const.DEFAULT_MAX_ATOMS) -> Iterator[AtomSet]:
        """Yield every subset, in increasing mask order."""
        self.check_enumerable(limit)
        for mask in range(1 << self.n_atoms):
            yield AtomSet(self, mask)


@dataclass(frozen=True)
class AtomSet:
    """A subset of a ground set stored as a bit mask."""

    ground: GroundSet
    mask: int

    def __post_init__(self):
        """Validate the members."""
        if self.mask < 0 or self.mask >> self.ground.n_atoms:
            raise InvalidInputError(
                f"mask {self.mask:#x} has atoms outside 0..{self.ground.n_atoms - 1}"
            )

    def _check(self, other: AtomSet) -> None:
        if other.ground != self.ground:
            raise InvalidInputError("sets live on different ground sets")

    def __or__(self, other: AtomSet) -> AtomSet:
        """Union."""
        self._check(other)
        return AtomSet(self.ground, self.mask | other.mask)

    def __and__(self, other: AtomSet) -> AtomSet:
        """Intersection."""
        self._check(other)
        return AtomSet(self.ground, self.mask & other.mask)

    def __sub__(self, other: AtomSet) -> AtomSet:
        """Difference."""
        self._check(other)
        return AtomSet(self.ground, self.mask & ~other.mask)

    def __invert__(self) -> AtomSet:
        """Complement in the ground set."""
        return AtomSet(self.ground, self.ground.full_mask & ~self.mask)

    def __le__(self, other: AtomSet) -> bool:
        """Subset test."""
        self._check(other)
        return self.mask & ~other.mask == 0

    def __contains__(self, atom: int) -> bool:
        """Membership."""
        return bool(self.mask >> atom & 1)

    def __iter__(self) -> Iterator[int]:
        """Iterate atoms in increasing order."""
        return iter_bits(self.mask)

    def __len__(self) -> int:
        """Number of atoms."""
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        """Non-empty."""
        return self.mask != 0

    def is_empty(self) -> bool:
        """Return True for the empty set."""
        return self.mask == 0

    def indices(self) -> list[int]:
        """Return the sorted atom indices."""
        return list(iter_bits(self.mask))

    def to_json(self) -> list[int]:
        """Serialize as a sorted index array."""
        return self.indices()

    def __repr__(self) -> str:
        """Return the representation."""
        return f"AtomSet({self.indices()})"


def _same_ground(sets: Sequence[AtomSet]) -> GroundSet:
    grounds = {item.ground for item in sets}
    if len(grounds) != 1:
        raise InvalidInputError("all sets must share one ground set")
    return grounds.pop()


@dataclass(frozen=True)
class Cover:
    """A sequence of sets with optional non-negative weights."""

    sets: tuple[AtomSet, ...]
    weights: tuple[Exact, ...] | None = None
    ground: GroundSet = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        """Validate sets and weights."""
        sets = tuple(self.sets)
        if not sets:
            raise InvalidInputError("a cover needs at least one entry")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "ground", _same_ground(sets))
        if self.weights is not None:
            weights = tuple(to_exact(w) for w in self.weights)
            if len(weights) != len(sets):
                raise InvalidInputError(
                    f"{len(weights)} weights given for {len(sets)} cover entries"
                )
            if any(w < 0 for w in weights):
                raise InvalidInputError("cover weights must be non-negative")
            object.__setattr__(self, "weights", weights)

    @classmethod
    def from_indices(
        cls,
        ground: GroundSet,
        entries: Iterable[Iterable[int]],
        weights: Iterable[Exact] | None = None,
    ) -> Cover:
        """Build a cover from index lists."""
        sets = tuple(ground.atom_set(entry) for entry in entries)
        return cls(sets, tuple(weights) if weights is not None else None)

    def __len__(self) -> int:
        """Number of entries."""
        return len(self.sets)

    @property
    def masks(self) -> tuple[int, ...]:
        """Entry bit masks."""
        return tuple(item.mask for item in self.sets)

    def require_weights(self) -> tuple[Exact, ...]:
        """Return the weights or raise if the cover is unweighted."""
        if self.weights is None:
            raise InvalidInputError("this operation needs a weighted cover")
        return self.weights

    def union(self) -> AtomSet:
        """Union of all entries."""
        mask = 0
        for item in self.sets:
            mask |= item.mask
        return AtomSet(self.ground, mask)

    def is_partition(self) -> bool:
        """Return True if the non-empty entries are disjoint and exhaustive."""
        seen = 0
        for mask in self.masks:
            if seen & mask:
                return False
            seen |= mask
        return seen == self.ground.full_mask

    def to_json(self) -> dict:
        """Serialize the cover."""
        from submeasure_lab.exact import exact_to_json

        data: dict = {"sets": [item.to_json() for item in self.sets]}
        if self.weights is not None:
            data["weights"] = [exact_to_json(w) for w in self.weights]
        return data


@dataclass(frozen=True)
class Partition:
    """Pairwise disjoint non-empty blocks whose union is the ground set."""

    blocks: tuple[AtomSet, ...]
    ground: GroundSet = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        """Validate and order blocks by their least atom."""
        blocks = tuple(self.blocks)
        if not blocks:
            raise InvalidInputError("a partition needs at least one block")
        ground = _same_ground(blocks)
        seen = 0
        for block in blocks:
            if block.is_empty():
                raise InvalidInputError("partition blocks must be non-empty")
            if seen & block.mask:
                raise InvalidInputError("partition blocks must be disjoint")
            seen |= block.mask
        if seen != ground.full_mask:
            raise InvalidInputError("partition blocks must cover the ground set")
        ordered = tuple(sorted(blocks, key=lambda block: (block.mask & -block.mask)))
        object.__setattr__(self, "blocks", ordered)
        object.__setattr__(self, "ground", ground)

    @classmethod
    def whole(cls, ground: GroundSet) -> Partition:
        """The one-block partition."""
        return cls((ground.full(),))

    @classmethod
    def singletons(cls, ground: GroundSet) -> Partition:
        """The partition into atoms."""
        return cls(tuple(ground.singleton(atom) for atom in range(ground.n_atoms)))

    @classmethod
    def from_indices(cls, ground: GroundSet, blocks: Iterable[Iterable[int]]) -> Partition:
        """Build a partition from index lists."""
        return cls(tuple(ground.atom_set(block) for block in blocks))

    def __len__(self) -> int:
        """Number of blocks."""
        return len(self.blocks)

    def finer_than(self, other: Partition) -> bool:
        """Return True if every block lies inside a block of other."""
        if other.ground != self.ground:
            return False
        return all(any(block <= outer for outer in other.blocks) for block in self.blocks)

    def block_of(self, atom: int) -> int:
        """Return the index of the block containing atom."""
        for index, block in enumerate(self.blocks):
            if atom in block:
                return index
        raise InvalidInputError(f"atom {atom} outside the ground set")

    def union_of(self, block_mask: int) -> AtomSet:
        """Union of the blocks selected by a mask over block indices."""
        mask = 0
        for index in iter_bits(block_mask):
            mask |= self.blocks[index].mask
        return AtomSet(self.ground, mask)

    def as_cover(self, weights: Iterable[Exact] | None = None) -> Cover:
        """View the partition as a cover."""
        return Cover(self.blocks, tuple(weights) if weights is not None else None)

    def to_json(self) -> list[list[int]]:
        """Serialize as index arrays."""
        return [block.to_json() for block in self.blocks]


# ----------------------------------------------------------------------
#  Multiplicity
# ----------------------------------------------------------------------
def hit_counts(cover: Cover) -> list[int]:
    """Return, per atom, the number of entries containing it."""
    counts = [0] * cover.ground.n_atoms
    for mask in cover.masks:
        for atom in iter_bits(mask):
            counts[atom] += 1
    return counts


def covering_multiplicity(cover: Cover) -> int:
    """Return the minimum hit count over the atoms."""
    return min(hit_counts(cover))


def is_uniform(cover: Cover) -> bool:
    """Return True if every atom is hit exactly the multiplicity many times."""
    counts = hit_counts(cover)
    return min(counts) == max(counts)


def uniform_refinement(cover: Cover) -> Cover:
    """Shrink entries so every atom is hit exactly k times.

    Each atom keeps its k lowest-index containing entries.
    """
    k = covering_multiplicity(cover)
    if k < 1:
        raise InvalidInputError("uniform refinement needs a cover of multiplicity at least 1")
    masks = cover.masks
    refined = [0] * len(masks)
    for atom in range(cover.ground.n_atoms):
        kept = 0
        for index, mask in enumerate(masks):
            if mask >> atom & 1:
                refined[index] |= 1 << atom
                kept += 1
                if kept == k:
                    break
    sets = tuple(AtomSet(cover.ground, mask) for mask in refined)
    return Cover(sets, cover.weights)


# ----------------------------------------------------------------------
#  Min-weight cover
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class MinCoverResult:
    """Optimal weight and chosen indices; infeasible when chosen is None."""

    weight: Exact | float
    chosen: frozenset[int] | None
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        """Return True if a cover exists."""
        return self.chosen is not None


def _prune_dominated(
    candidates: list[tuple[int, int, Exact]]
) -> list[tuple[int, int, Exact]]:
    """Drop candidates whose trace lies in a no more expensive candidate's trace."""
    kept = []
    for index, trace, weight in candidates:
        dominated = False
        for other_index, other_trace, other_weight in candidates:
            if other_index == index or trace & ~other_trace:
                continue
            if other_weight < weight or (
                other_weight == weight and (other_trace != trace or other_index < index)
            ):
                dominated = True
                break
        if not dominated:
            kept.append((index, trace, weight))
    return kept


def _greedy(target: int, candidates: list[tuple[int, int, Exact]]) -> tuple[Exact, list[int]]:
    uncovered = target
    cost: Exact = Fraction(0)
    chosen: list[int] = []
    while uncovered:
        best = None
        best_ratio = math.inf
        for index, trace, weight in candidates:
            gain = (trace & uncovered).bit_count()
            if not gain:
                continue
            ratio = float(weight) / gain
            if ratio < best_ratio:
                best, best_ratio = (index, trace, weight), ratio
        assert best is not None
        chosen.append(best[0])
        cost = cost + best[2]
        uncovered &= ~best[1]
    return cost, chosen


def min_weight_cover(target: AtomSet, candidates: Cover) -> MinCoverResult:
    """Return the cheapest index set whose entries contain target.

    Branch-and-bound: branch on the uncovered atom with the fewest candidates,
    bound by the cost so far plus the most expensive cheapest candidate of any
    uncovered atom.
    """
    if target.ground != candidates.ground:
        raise InvalidInputError("target and candidates live on different ground sets")
    weights = candidates.require_weights()
    if target.is_empty():
        return MinCoverResult(Fraction(0), frozenset())

    pool = [
        (index, mask & target.mask, weights[index])
        for index, mask in enumerate(candidates.masks)
        if mask & target.mask
    ]
    reach = 0
    for _, trace, _ in pool:
        reach |= trace
    if reach != target.mask:
        return MinCoverResult(math.inf, None)

    pool = _prune_dominated(pool)
    atoms = list(iter_bits(target.mask))
    containing = {atom: [c for c in pool if c[1] >> atom & 1] for atom in atoms}
    for atom in atoms:
        containing[atom].sort(key=lambda c: (c[2], c[0]))
    cheapest = {atom: containing[atom][0][2] for atom in atoms}

    best_cost, best_chosen = _greedy(target.mask, pool)
    nodes = 0

    def search(uncovered: int, cost: Exact, chosen: list[int]) -> None:
        nonlocal best_cost, best_chosen, nodes
        nodes += 1
        if not uncovered:
            if cost < best_cost:
                best_cost, best_chosen = cost, list(chosen)
            return
        bound = cost + max(cheapest[atom] for atom in iter_bits(uncovered))
        if bound >= best_cost:
            return
        pivot = min(
            iter_bits(uncovered),
            key=lambda atom: sum(1 for c in containing[atom] if c[1] & uncovered),
        )
        for index, trace, weight in containing[pivot]:
            chosen.append(index)
            search(uncovered & ~trace, cost + weight, chosen)
            chosen.pop()

    search(target.mask, Fraction(0), [])
    LOGGER.debug("min_weight_cover explored %d nodes over %d candidates", nodes, len(pool))
    return MinCoverResult(best_cost, frozenset(best_chosen), nodes)


def exhaustive_min_weight_cover(
    target: AtomSet, candidates: Cover, limit: int = const.SUBSET_SWEEP_LIMIT
) -> MinCoverResult:
    """Reference solver trying all index subsets."""
    weights = candidates.require_weights()
    masks = candidates.masks
    if len(masks) > limit:
        raise LimitExceededError("candidate count", len(masks), limit)
    best: Exact | float = math.inf
    best_chosen: frozenset[int] | None = None
    for size in range(len(masks) + 1):
        for combo in combinations(range(len(masks)), size):
            union = 0
            for index in combo:
                union |= masks[index]
            if target.mask & ~union:
                continue
            cost = exact_sum(weights[index] for index in combo)
            if best_chosen is None or cost < best:
                best, best_chosen = cost, frozenset(combo)
    return MinCoverResult(best, best_chosen)


# ----------------------------------------------------------------------
#  Partitions
# ----------------------------------------------------------------------
def refine_partitions(first: Partition, second: Partition) -> Partition:
    """Return the coarsest common refinement."""
    if first.ground != second.ground:
        raise InvalidInputError("partitions live on different ground sets")
    blocks = [
        outer & inner
        for outer in first.blocks
        for inner in second.blocks
        if outer.mask & inner.mask
    ]
    return Partition(tuple(blocks))
