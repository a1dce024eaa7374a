"""Submeasures on finite set algebras and their concrete constructions."""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from decimal import MAX_EMAX, MIN_EMIN, Context, Decimal, localcontext
from fractions import Fraction
from typing import Any, ClassVar

import numpy as np

from submeasure_lab import const
from submeasure_lab.algebra import AtomSet, Cover, GroundSet, Partition, min_weight_cover
from submeasure_lab.exact import Exact, Surd, exact_sum, exact_to_json, to_exact
from submeasure_lab.exceptions import InvalidInputError, LabError, LimitExceededError
from submeasure_lab.utils import iter_bits, spawn_rng

LOGGER = logging.getLogger(__name__)


class Submeasure(ABC):
    """A set function on all subsets of a ground set."""

    kind: ClassVar[str]

    def __init__(self, ground: GroundSet):
        """Initialize with the ground set."""
        self.ground = ground

    @abstractmethod
    def value(self, mask: int) -> Exact:
        """Evaluate on the subset given by a bit mask."""

    def evaluate(self, subset: AtomSet) -> Exact:
        """Evaluate on an AtomSet."""
        if subset.ground != self.ground:
            raise InvalidInputError("set lives on a different ground set")
        return self.value(subset.mask)

    __call__ = evaluate

    def total(self) -> Exact:
        """Value on the whole ground set."""
        return self.value(self.ground.full_mask)

    def __repr__(self) -> str:
        """Return the representation."""
        return f"<{type(self).__name__} kind={self.kind} atoms={self.ground.n_atoms}>"


class AtomMeasure(Submeasure):
    """An additive set function given by non-negative atom weights."""

    kind = "measure"

    def __init__(self, ground: GroundSet, atom_weights: Sequence[Exact]):
        """Initialize with one weight per atom."""
        super().__init__(ground)
        weights = tuple(to_exact(w) for w in atom_weights)
        if len(weights) != ground.n_atoms:
            raise InvalidInputError(
                f"{len(weights)} weights given for {ground.n_atoms} atoms"
            )
        if any(w < 0 for w in weights):
            raise InvalidInputError("measure weights must be non-negative")
        self.atom_weights = weights
        self._uniform = weights[0] if len(set(weights)) == 1 else None

    def value(self, mask: int) -> Exact:
        """Sum the weights of the atoms in mask."""
        if self._uniform is not None:
            return self._uniform * mask.bit_count()
        return exact_sum(self.atom_weights[atom] for atom in iter_bits(mask))

    def mass(self) -> Exact:
        """Total mass."""
        return self.total()


def make_measure(atom_weights: Sequence[Any]) -> AtomMeasure:
    """Build a measure on len(atom_weights) atoms."""
    return AtomMeasure(GroundSet(len(atom_weights)), atom_weights)


def zero_submeasure(ground: GroundSet) -> AtomMeasure:
    """The zero submeasure."""
    return AtomMeasure(ground, [Fraction(0)] * ground.n_atoms)


class TableSubmeasure(Submeasure):
    """A set function given by an explicit value table."""

    kind = "table"

    def __init__(
        self,
        ground: GroundSet,
        values: Mapping[int, Exact],
        default: Exact | None = None,
    ):
        """Initialize with values keyed by bit mask."""
        super().__init__(ground)
        self.values = {int(mask): to_exact(v) for mask, v in values.items()}
        self.default = to_exact(default) if default is not None else None
        for mask in self.values:
            if mask < 0 or mask >> ground.n_atoms:
                raise InvalidInputError(f"table key {mask:#x} outside the ground set")

    @classmethod
    def from_function(
        cls,
        ground: GroundSet,
        func: Callable[[AtomSet], Any],
        limit: int = const.DEFAULT_MAX_ATOMS,
    ) -> TableSubmeasure:
        """Tabulate func on every subset."""
        values = {subset.mask: to_exact(func(subset)) for subset in ground.subsets(limit)}
        return cls(ground, values)

    def value(self, mask: int) -> Exact:
        """Look the value up."""
        try:
            return self.values[mask]
        except KeyError:
            if self.default is None:
                raise InvalidInputError(f"no table value for mask {mask:#x}") from None
            return Fraction(0) if mask == 0 else self.default


def make_table(
    ground: GroundSet, values: Mapping[int, Any], default: Any | None = None
) -> TableSubmeasure:
    """Build a table-defined set function."""
    return TableSubmeasure(ground, values, default)


# ----------------------------------------------------------------------
#  Cover-generated submeasures
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class WeightedCoverFamily:
    """Weighted generators plus a whole-space generator of fallback weight."""

    generators: tuple[tuple[AtomSet, Exact], ...]
    fallback_weight: Exact
    ground: GroundSet

    def __post_init__(self):
        """Validate the generators."""
        gens = tuple((subset, to_exact(weight)) for subset, weight in self.generators)
        for subset, weight in gens:
            if subset.ground != self.ground:
                raise InvalidInputError("generator lives on a different ground set")
            if not weight > 0:
                raise InvalidInputError("generator weights must be positive")
        fallback = to_exact(self.fallback_weight)
        if not fallback > 0:
            raise InvalidInputError("the whole-space weight must be positive")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "fallback_weight", fallback)

    def cover(self) -> Cover:
        """Return the generators, whole space last, as a weighted cover."""
        sets = [subset for subset, _ in self.generators] + [self.ground.full()]
        weights = [weight for _, weight in self.generators] + [self.fallback_weight]
        return Cover(tuple(sets), tuple(weights))


class CoverGeneratedSubmeasure(Submeasure):
    """phi(A) = least total weight of generators whose union contains A."""

    kind = "cover_generated"

    def __init__(self, family: WeightedCoverFamily):
        """Initialize from a generator family."""
        super().__init__(family.ground)
        self.family = family
        cheapest: dict[int, Exact] = {}
        for subset, weight in zip(family.cover().sets, family.cover().weights or ()):
            if subset.mask and (subset.mask not in cheapest or weight < cheapest[subset.mask]):
                cheapest[subset.mask] = weight
        masks = sorted(cheapest)
        self.cover = Cover(
            tuple(AtomSet(self.ground, mask) for mask in masks),
            tuple(cheapest[mask] for mask in masks),
        )
        self._memo: dict[int, Exact] = {0: Fraction(0)}
        self._table: tuple[np.ndarray, list[Exact]] | None = None
        if len(masks) <= const.COVER_TABLE_MAX_GENERATORS and self.ground.n_atoms <= 64:
            self._table = self._build_table()

    def _build_table(self) -> tuple[np.ndarray, list[Exact]]:
        unions = np.zeros(1, dtype=np.uint64)
        weights: list[Exact] = [Fraction(0)]
        for subset, weight in zip(self.cover.sets, self.cover.weights or ()):
            unions = np.concatenate([unions, unions | np.uint64(subset.mask)])
            weights = weights + [w + weight for w in weights]
        order = sorted(range(len(weights)), key=weights.__getitem__)
        LOGGER.debug("Built cover table with %d generator subsets", len(order))
        return unions[np.asarray(order, dtype=np.int64)], [weights[i] for i in order]

    @property
    def strategy(self) -> str:
        """Name of the evaluation strategy in use."""
        return "table" if self._table is not None else "branch_and_bound"

    def value(self, mask: int) -> Exact:
        """Least cover weight, memoized."""
        cached = self._memo.get(mask)
        if cached is not None:
            return cached
        if self._table is not None:
            unions, weights = self._table
            target = np.uint64(mask)
            first = int(np.argmax((unions & target) == target))
            result = weights[first]
        else:
            result = min_weight_cover(AtomSet(self.ground, mask), self.cover).weight
        self._memo[mask] = result
        return result

    def branch_and_bound_value(self, mask: int) -> Exact:
        """Evaluate without table or memo."""
        return min_weight_cover(AtomSet(self.ground, mask), self.cover).weight


def make_cover_generated(family: WeightedCoverFamily) -> CoverGeneratedSubmeasure:
    """Build the submeasure generated by a weighted family."""
    return CoverGeneratedSubmeasure(family)


# ----------------------------------------------------------------------
#  Level blocks of a truncated product
# ----------------------------------------------------------------------
class LevelBlockIndex:
    """Leaf cells of K_1 x ... x K_depth with the blocks [i, n] = {x : x_n = i}."""

    def __init__(self, level_sizes: Sequence[int]):
        """Initialize with the level sizes."""
        sizes = tuple(int(size) for size in level_sizes)
        if not sizes or any(size < 1 for size in sizes):
            raise InvalidInputError("level sizes must be positive and non-empty")
        self.level_sizes = sizes
        self.depth = len(sizes)
        n_atoms = math.prod(sizes)
        if n_atoms > const.EXAMPLE_MAX_ATOMS:
            raise LimitExceededError("leaf count", n_atoms, const.EXAMPLE_MAX_ATOMS)
        self.ground = GroundSet(n_atoms)
        self._coords = np.array(np.unravel_index(np.arange(n_atoms), sizes))
        self._blocks: dict[tuple[int, int], AtomSet] = {}

    def coordinate(self, atom: int, level: int) -> int:
        """Return x_level of a leaf atom (levels are 1-based)."""
        return int(self._coords[level - 1, atom])

    def block(self, index: int, level: int) -> AtomSet:
        """Return [index, level]."""
        if not 1 <= level <= self.depth or not 0 <= index < self.level_sizes[level - 1]:
            raise InvalidInputError(f"no block [{index},{level}]")
        key = (index, level)
        if key not in self._blocks:
            atoms = np.flatnonzero(self._coords[level - 1] == index)
            self._blocks[key] = self.ground.atom_set(atoms.tolist())
        return self._blocks[key]

    def blocks_at(self, level: int) -> Partition:
        """The partition of the leaves by their level coordinate."""
        return Partition(
            tuple(self.block(index, level) for index in range(self.level_sizes[level - 1]))
        )


@dataclass
class ExampleEasy:
    """A truncation of the level-block submeasure with its companion measures."""

    index: LevelBlockIndex
    m_values: tuple[int, ...]
    xi: tuple[Exact, ...]
    submeasure: CoverGeneratedSubmeasure
    measures: tuple[AtomMeasure, ...]
    depth: int = field(init=False)

    def __post_init__(self):
        """Derive the depth."""
        self.depth = self.index.depth

    def measure(self, level: int) -> AtomMeasure:
        """Return mu_level (1-based)."""
        return self.measures[level - 1]

    def check_block_bound(self) -> list[tuple[int, int]]:
        """Return the blocks [i, n] with phi([i, n]) > xi_n."""
        violations = []
        for level in range(1, self.depth + 1):
            for index in range(self.index.level_sizes[level - 1]):
                if self.submeasure(self.index.block(index, level)) > self.xi[level]:
                    violations.append((index, level))
        return violations

    def check_domination(self, mask: int) -> list[int]:
        """Return the levels n with phi(A) <= xi_n but mu_n(A) > phi(A)."""
        phi = self.submeasure.value(mask)
        return [
            level
            for level in range(1, self.depth + 1)
            if phi <= self.xi[level] and self.measures[level - 1].value(mask) > phi
        ]

    def exhaustive_domination_check(
        self, limit: int = const.SUBSET_SWEEP_LIMIT
    ) -> tuple[int, list[tuple[int, int]]]:
        """Check the domination implication on every subset."""
        self.index.ground.check_enumerable(limit)
        violations = [
            (mask, level)
            for mask in range(1 << self.index.ground.n_atoms)
            for level in self.check_domination(mask)
        ]
        return 1 << self.index.ground.n_atoms, violations

    def sample_domination_check(
        self, samples: int, seed: int
    ) -> tuple[int, list[tuple[int, int]]]:
        """Check the domination implication on random subsets."""
        rng = spawn_rng(seed, 0)
        n_atoms = self.index.ground.n_atoms
        violations = []
        for _ in range(samples):
            density = rng.random() ** 3
            members = np.flatnonzero(rng.random(n_atoms) < density)
            mask = 0
            for atom in members.tolist():
                mask |= 1 << atom
            violations.extend((mask, level) for level in self.check_domination(mask))
        return samples, violations


def _default_m_rule(level: int) -> int:
    return level**3


def validate_m_rule(m_rule: Callable[[int], int], depth: int) -> tuple[int, ...]:
    """Return M_1..M_{depth+1}, checking n | M_n and n <= sqrt(M_n)/n non-decreasing."""
    values = []
    for level in range(1, depth + 2):
        m_value = m_rule(level)
        if isinstance(m_value, bool) or not isinstance(m_value, int) or m_value < 1:
            raise InvalidInputError(f"M_{level} must be a positive integer, got {m_value!r}")
        if m_value % level:
            raise InvalidInputError(f"M_{level} = {m_value} is not divisible by {level}")
        if m_value < level * level:
            raise InvalidInputError(f"sqrt(M_{level})/{level} < 1 for M_{level} = {m_value}")
        values.append(m_value)
    for level in range(1, depth + 1):
        # sqrt(M_n)/n <= sqrt(M_{n+1})/(n+1)
        if values[level - 1] * (level + 1) ** 2 > values[level] * level**2:
            raise InvalidInputError(f"sqrt(M_n)/n decreases at n = {level}")
    return tuple(values)


def example_easy(depth: int, m_rule: Callable[[int], int] | None = None) -> ExampleEasy:
    """Truncate the level-block construction to coordinates 1..depth."""
    if depth < 1:
        raise InvalidInputError("depth must be at least 1")
    m_values = validate_m_rule(m_rule or _default_m_rule, depth)[:depth]
    level_sizes = tuple(m_value // level for level, m_value in enumerate(m_values, start=1))
    index = LevelBlockIndex(level_sizes)
    xi: tuple[Exact, ...] = (Fraction(1),) + tuple(
        Surd.sqrt(Fraction(1, m_value)) for m_value in m_values
    )
    generators = tuple(
        (index.block(i, level), xi[level])
        for level in range(1, depth + 1)
        for i in range(level_sizes[level - 1])
    )
    family = WeightedCoverFamily(generators, xi[0], index.ground)
    measures = []
    for level in range(1, depth + 1):
        weight: Exact = xi[level]
        for other, size in enumerate(level_sizes, start=1):
            if other != level:
                weight = weight * Fraction(1, size)
        measures.append(AtomMeasure(index.ground, [weight] * index.ground.n_atoms))
    LOGGER.debug("Example easy depth %d has %d atoms", depth, index.ground.n_atoms)
    return ExampleEasy(
        index=index,
        m_values=m_values,
        xi=xi,
        submeasure=CoverGeneratedSubmeasure(family),
        measures=tuple(measures),
    )


def tree_submeasure(
    level_sizes: Sequence[int], weights: Sequence[Any]
) -> CoverGeneratedSubmeasure:
    """Truncated prefix-cylinder submeasure: [s] costs weights[len(s)].

    Leaves of M_1 x ... x M_k are the atoms; weights[0] prices the whole space.
    """
    sizes = tuple(int(size) for size in level_sizes)
    if not sizes or any(size < 1 for size in sizes):
        raise InvalidInputError("level sizes must be positive and non-empty")
    if len(weights) != len(sizes) + 1:
        raise InvalidInputError(f"need {len(sizes) + 1} weights for {len(sizes)} levels")
    prices = tuple(to_exact(w) for w in weights)
    n_atoms = math.prod(sizes)
    if n_atoms > const.EXAMPLE_MAX_ATOMS:
        raise LimitExceededError("leaf count", n_atoms, const.EXAMPLE_MAX_ATOMS)
    ground = GroundSet(n_atoms)
    generators = []
    for length in range(1, len(sizes) + 1):
        span = math.prod(sizes[length:])
        for prefix in range(math.prod(sizes[:length])):
            mask = ((1 << span) - 1) << (prefix * span)
            generators.append((AtomSet(ground, mask), prices[length]))
    return CoverGeneratedSubmeasure(WeightedCoverFamily(tuple(generators), prices[0], ground))


# ----------------------------------------------------------------------
#  Parameters of the prefix-cylinder construction
# ----------------------------------------------------------------------
def _decimal_context() -> Context:
    return Context(prec=60, Emin=MIN_EMIN, Emax=MAX_EMAX)


@dataclass(frozen=True)
class BerryEsseenParams:
    """Level sizes M_i, weights w_i (w_0 = 1) and the truncated eps_k series."""

    theta: Callable[[Decimal], Decimal] = field(repr=False)
    k_const: Decimal
    m_values: tuple[Decimal, ...]
    w_values: tuple[Decimal, ...]
    eps_values: tuple[Decimal, ...]

    @property
    def i_max(self) -> int:
        """Number of levels."""
        return len(self.m_values)

    def _prefix(self, start: int, stop: int) -> Decimal:
        """M_start * ... * M_{stop-1} (1-based, empty product is 1)."""
        product = Decimal(1)
        for level in range(start, stop):
            product *= self.m_values[level - 1]
        return product

    def check(self, tolerance: Decimal = Decimal("1e-40")) -> dict[str, bool]:
        """Re-substitute the sequences into their defining relations."""
        with localcontext(_decimal_context()):
            one_ok = mm_ok = True
            for level in range(1, self.i_max + 1):
                w = self.w_values[level]
                prefix = self._prefix(1, level)
                root_theta = self.theta(w).sqrt()
                one_ok &= w <= Decimal(2) ** -level
                one_ok &= Decimal(2) ** (2 * level + 5) * prefix * self.k_const**level * root_theta < 1
                low = Decimal(2) ** level * w * prefix.sqrt() * root_theta
                inv_root_m = 1 / self.m_values[level - 1].sqrt()
                mm_ok &= self.m_values[level - 1] >= 1
                mm_ok &= low <= inv_root_m * (1 + tolerance)
                mm_ok &= inv_root_m <= 2 * low * (1 + tolerance)
            recursion_ok = True
            for level in range(1, self.i_max + 1):
                root_m = self.m_values[level - 1].sqrt()
                expected = self.k_const * (
                    1 / (self.w_values[level] * root_m)
                    + root_m * self.eps_values[level]
                    + 1 / root_m
                )
                actual = self.eps_values[level - 1]
                recursion_ok &= abs(actual - expected) <= tolerance * abs(expected)
            eps = self.eps_values
            return {
                "one": bool(one_ok),
                "mm": bool(mm_ok),
                "recursion": bool(recursion_ok),
                "eps0_below_quarter": bool(eps[0] < Decimal("0.25")),
                "positive": all(value > 0 for value in eps[:-1]),
                "decreasing": all(eps[k] > eps[k + 1] for k in range(len(eps) - 1)),
            }

    def to_json(self) -> dict:
        """Serialize with decimal strings."""
        return {
            "k_const": str(self.k_const),
            "M": [format(m, "f") if m.adjusted() < 30 else str(m) for m in self.m_values],
            "w": [str(w) for w in self.w_values],
            "eps": [str(e) for e in self.eps_values],
        }


def _find_weight(
    theta: Callable[[Decimal], Decimal],
    level: int,
    prefix: Decimal,
    k_const: Decimal,
    budget: int,
) -> tuple[Decimal, int]:
    """Return the largest w = 2^-j, j >= level, with 2^(2i+5) P K^i sqrt(theta(w)) < 1."""
    scale = Decimal(2) ** (2 * level + 5) * prefix * k_const**level
    used = 0

    def holds(exponent: int) -> bool:
        nonlocal used
        used += 1
        if used > budget:
            raise LabError(f"no weight for level {level} within {budget} theta evaluations")
        value = theta(Decimal(2) ** -exponent)
        if not value > 0:
            raise InvalidInputError(f"theta must be positive, got {value}")
        return scale * value.sqrt() < 1

    high = level
    if holds(high):
        return Decimal(2) ** -high, used
    low = high
    while not holds(high):
        low, high = high, high * 2
    while high - low > 1:
        middle = (low + high) // 2
        if holds(middle):
            high = middle
        else:
            low = middle
    return Decimal(2) ** -high, used


def berry_esseen_params(
    theta: Callable[[Decimal], Decimal],
    i_max: int,
    k_const: Any = const.DEFAULT_BERRY_ESSEEN_K,
    search_budget: int = const.BERRY_ESSEEN_SEARCH_BUDGET,
) -> BerryEsseenParams:
    """Choose w_i, M_i level by level and sum the truncated eps_k series."""
    if not 1 <= i_max <= const.BERRY_ESSEEN_MAX_LEVELS:
        raise LimitExceededError("level count", i_max, const.BERRY_ESSEEN_MAX_LEVELS)
    with localcontext(_decimal_context()):
        k_value = Decimal(str(k_const))
        if k_value < 1:
            raise InvalidInputError("K must be at least 1")
        w_values = [Decimal(1)]
        m_values: list[Decimal] = []
        prefix = Decimal(1)
        for level in range(1, i_max + 1):
            w, used = _find_weight(theta, level, prefix, k_value, search_budget)
            low = Decimal(2) ** level * w * prefix.sqrt() * theta(w).sqrt()
            m_value = (1 / (low * low)).to_integral_value(rounding="ROUND_FLOOR")
            LOGGER.debug("Level %d: w=%s after %d theta calls", level, w, used)
            w_values.append(w)
            m_values.append(m_value)
            prefix *= m_value
        eps_values = []
        for start in range(i_max + 1):
            total = Decimal(0)
            partial = Decimal(1)
            for level in range(start + 1, i_max + 1):
                m_root = m_values[level - 1].sqrt()
                total += (1 / w_values[level] + 1) * partial.sqrt() / m_root * k_value ** (level - start)
                partial *= m_values[level - 1]
            eps_values.append(total)
    return BerryEsseenParams(
        theta=theta,
        k_const=k_value,
        m_values=tuple(m_values),
        w_values=tuple(w_values),
        eps_values=tuple(eps_values),
    )


def power_theta(exponent: Any) -> Callable[[Decimal], Decimal]:
    """theta(xi) = xi ** exponent."""
    power = Decimal(str(exponent))
    if power <= 0:
        raise InvalidInputError("theta exponent must be positive")

    def theta(xi: Decimal) -> Decimal:
        return xi**power

    return theta


def log_theta() -> Callable[[Decimal], Decimal]:
    """theta(xi) = 1 / (1 + ln(1/xi))."""

    def theta(xi: Decimal) -> Decimal:
        return 1 / (1 + (1 / xi).ln())

    return theta


# ----------------------------------------------------------------------
#  Axiom audit
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class AuditReport:
    """Result of checking the submeasure axioms."""

    passed: bool
    mode: str
    checked: int
    counterexample: dict | None = None


def _counterexample(axiom: str, ground: GroundSet, *masks: int, values: Iterable[Exact]) -> dict:
    return {
        "axiom": axiom,
        "sets": [AtomSet(ground, mask).to_json() for mask in masks],
        "values": [exact_to_json(v) for v in values],
    }


def _exhaustive_audit(phi: Submeasure) -> AuditReport:
    ground = phi.ground
    n_atoms = ground.n_atoms
    values = [phi.value(mask) for mask in range(1 << n_atoms)]
    checked = 1
    if values[0] != 0:
        return AuditReport(False, "exhaustive", checked, _counterexample("empty", ground, 0, values=[values[0]]))
    for mask in range(1 << n_atoms):
        for atom in range(n_atoms):
            if mask >> atom & 1:
                continue
            bigger = mask | 1 << atom
            checked += 1
            if values[mask] > values[bigger]:
                return AuditReport(
                    False,
                    "exhaustive",
                    checked,
                    _counterexample("monotonicity", ground, mask, bigger, values=[values[mask], values[bigger]]),
                )
    full = ground.full_mask
    for first in range(1 << n_atoms):
        rest = full & ~first
        second = rest
        while second:
            if first < second:
                checked += 1
                union = first | second
                if values[union] > values[first] + values[second]:
                    return AuditReport(
                        False,
                        "exhaustive",
                        checked,
                        _counterexample(
                            "subadditivity",
                            ground,
                            first,
                            second,
                            values=[values[first], values[second], values[union]],
                        ),
                    )
            second = (second - 1) & rest
    return AuditReport(True, "exhaustive", checked)


def audit_submeasure(
    phi: Submeasure, trials: int = 1000, seed: int = 0, exhaustive: bool | None = None
) -> AuditReport:
    """Check phi(empty) = 0, monotonicity and subadditivity.

    Exhaustive mode (default for at most 12 atoms) checks single-atom
    extensions and all disjoint pairs; otherwise random pairs are drawn.
    """
    if trials < 1:
        raise InvalidInputError("trials must be at least 1")
    n_atoms = phi.ground.n_atoms
    if exhaustive is None:
        exhaustive = n_atoms <= const.EXHAUSTIVE_AUDIT_LIMIT
    if exhaustive:
        phi.ground.check_enumerable(const.EXHAUSTIVE_AUDIT_LIMIT)
        return _exhaustive_audit(phi)

    ground = phi.ground
    empty = phi.value(0)
    if empty != 0:
        return AuditReport(False, "random", 1, _counterexample("empty", ground, 0, values=[empty]))
    rng = spawn_rng(seed, 0)
    for trial in range(trials):
        masks = []
        for _ in range(2):
            members = np.flatnonzero(rng.random(n_atoms) < rng.random())
            mask = 0
            for atom in members.tolist():
                mask |= 1 << atom
            masks.append(mask)
        first, second = masks
        union = first | second
        v_first, v_second, v_union = phi.value(first), phi.value(second), phi.value(union)
        if v_first > v_union:
            return AuditReport(
                False,
                "random",
                trial + 1,
                _counterexample("monotonicity", ground, first, union, values=[v_first, v_union]),
            )
        if v_union > v_first + v_second:
            return AuditReport(
                False,
                "random",
                trial + 1,
                _counterexample(
                    "subadditivity", ground, first, second, values=[v_first, v_second, v_union]
                ),
            )
    return AuditReport(True, "random", trials)
