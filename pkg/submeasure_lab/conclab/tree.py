"""Majority extensions and the repair relation on labelings of a finite tree."""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Any

import numpy as np
from scipy.stats import binom

from submeasure_lab import const
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.utils import format_rational, parse_rational

LOGGER = logging.getLogger(__name__)

Node = tuple[int, ...]
Rule = Callable[[int, int, int], bool]


@dataclass(frozen=True)
class TreeSpec:
    """T = M_1 x ... x M_k with thresholds d_1..d_k.

    Leaves are numbered in mixed radix with level 1 most significant, and a
    labeling of the leaves is an int whose bit t is the label of leaf t.
    """

    level_sizes: tuple[int, ...]
    thresholds: tuple[Fraction, ...]

    def __post_init__(self):
        """Validate and normalize."""
        sizes = tuple(int(m) for m in self.level_sizes)
        thresholds = tuple(parse_rational(d) for d in self.thresholds)
        if not sizes:
            raise InvalidInputError("a tree needs at least one level")
        if len(thresholds) != len(sizes):
            raise InvalidInputError("one threshold per level is needed")
        if any(m < 2 for m in sizes):
            raise InvalidInputError("level sizes must be at least 2")
        if any(d <= 0 for d in thresholds):
            raise InvalidInputError("thresholds must be positive")
        leaves = math.prod(sizes)
        if leaves > const.TREE_MAX_LEAVES:
            raise LimitExceededError("leaf count", leaves, const.TREE_MAX_LEAVES)
        object.__setattr__(self, "level_sizes", sizes)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def depth(self) -> int:
        """k."""
        return len(self.level_sizes)

    @property
    def n_leaves(self) -> int:
        """|T|."""
        return math.prod(self.level_sizes)

    @property
    def n_nodes(self) -> int:
        """|T_<=|, root included."""
        return sum(math.prod(self.level_sizes[:i]) for i in range(self.depth + 1))

    def nodes(self) -> list[Node]:
        """T_<= ordered by level, then lexicographically."""
        return [
            node
            for level in range(self.depth + 1)
            for node in product(*(range(m) for m in self.level_sizes[:level]))
        ]

    def leaves(self) -> list[Node]:
        """T in leaf-index order."""
        return list(product(*(range(m) for m in self.level_sizes)))

    def children(self, node: Node) -> list[Node]:
        """Immediate successors of a node."""
        if len(node) >= self.depth:
            return []
        return [node + (j,) for j in range(self.level_sizes[len(node)])]

    def leaf_span(self, node: Node) -> range:
        """Indices of the leaves below a node."""
        width = math.prod(self.level_sizes[len(node) :])
        start = 0
        for level, digit in enumerate(node):
            start = start * self.level_sizes[level] + digit
        return range(start * width, (start + 1) * width)

    def subtree_mask(self, node: Node) -> int:
        """Bit mask of the leaves below a node."""
        span = self.leaf_span(node)
        return ((1 << len(span)) - 1) << span.start

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "level_sizes": list(self.level_sizes),
            "thresholds": [format_rational(d) for d in self.thresholds],
        }


# ----------------------------------------------------------------------
#  Extensions
# ----------------------------------------------------------------------
def _majority(_spec: TreeSpec) -> Rule:
    return lambda level, count, size: 2 * count > size


def _shifted(spec: TreeSpec) -> Rule:
    return lambda level, count, size: count >= Fraction(size, 2) + spec.thresholds[level]


def _check_labeling(y: int, spec: TreeSpec) -> int:
    y = int(y)
    if y < 0 or y >> spec.n_leaves:
        raise InvalidInputError(f"labeling {y:#x} has bits outside the {spec.n_leaves} leaves")
    return y


def _extend(y: int, spec: TreeSpec, rule: Rule) -> dict[Node, int]:
    y = _check_labeling(y, spec)
    labels: dict[Node, int] = {leaf: y >> index & 1 for index, leaf in enumerate(spec.leaves())}
    for level in range(spec.depth - 1, -1, -1):
        size = spec.level_sizes[level]
        for node in product(*(range(m) for m in spec.level_sizes[:level])):
            count = sum(labels[child] for child in spec.children(node))
            labels[node] = int(rule(level, count, size))
    return labels


def ybar_extension(y: int, spec: TreeSpec) -> dict[Node, int]:
    """A node is 1 iff strictly more than half of its children are 1."""
    return _extend(y, spec, _majority(spec))


def yhat_extension(y: int, spec: TreeSpec) -> dict[Node, int]:
    """A node on level i is 1 iff at least M_{i+1}/2 + d_{i+1} of its children are 1."""
    return _extend(y, spec, _shifted(spec))


def _root_values(spec: TreeSpec, rule: Rule) -> np.ndarray:
    """Root label of every leaf labeling, vectorized."""
    if spec.n_leaves > const.TREE_BRUTE_FORCE_MAX_LEAVES:
        raise LimitExceededError("leaf count", spec.n_leaves, const.TREE_BRUTE_FORCE_MAX_LEAVES)
    labelings = np.arange(1 << spec.n_leaves, dtype=np.int64)
    bits = (labelings[:, None] >> np.arange(spec.n_leaves, dtype=np.int64)) & 1
    values = bits.reshape((len(labelings),) + spec.level_sizes)
    for level in range(spec.depth - 1, -1, -1):
        counts = values.sum(axis=-1)
        size = spec.level_sizes[level]
        passing = np.array([rule(level, c, size) for c in range(size + 1)])
        values = passing[counts].astype(np.int64)
    return values.astype(bool)


def count_root_zero(spec: TreeSpec, rule: Rule) -> int:
    """Number of leaf labelings whose root label is 0, by counting over the tree."""
    ones, zeros = 1, 1
    for level in range(spec.depth - 1, -1, -1):
        size = spec.level_sizes[level]
        total = (ones + zeros) ** size
        ones = sum(
            math.comb(size, c) * ones**c * zeros ** (size - c)
            for c in range(size + 1)
            if rule(level, c, size)
        )
        zeros = total - ones
    return zeros


# ----------------------------------------------------------------------
#  The repair relation
# ----------------------------------------------------------------------
def _root_repairable(diff: int, spec: TreeSpec) -> bool:
    """Root repairable: a leaf is repairable iff unchanged, a node iff fewer than d bad children."""
    bad = [diff >> index & 1 for index in range(spec.n_leaves)]
    for level in range(spec.depth - 1, -1, -1):
        size = spec.level_sizes[level]
        threshold = spec.thresholds[level]
        bad = [int(not sum(bad[i : i + size]) < threshold) for i in range(0, len(bad), size)]
    return not bad[0]


def sim_related(x: int, y: int, spec: TreeSpec) -> bool:
    """Whether some S of non-root nodes covers every differing leaf by a prefix
    while picking fewer than d_{i+1} children of every node on level i."""
    return _root_repairable(_check_labeling(x, spec) ^ _check_labeling(y, spec), spec)


def relatable_differences(spec: TreeSpec) -> np.ndarray:
    """Boolean table over all difference masks D: x ~ x ^ D."""
    if spec.n_leaves > const.TREE_BRUTE_FORCE_MAX_LEAVES:
        raise LimitExceededError("leaf count", spec.n_leaves, const.TREE_BRUTE_FORCE_MAX_LEAVES)
    diffs = np.arange(1 << spec.n_leaves, dtype=np.int64)
    bad = ((diffs[:, None] >> np.arange(spec.n_leaves, dtype=np.int64)) & 1).reshape(
        (len(diffs),) + spec.level_sizes
    )
    for level in range(spec.depth - 1, -1, -1):
        counts = bad.sum(axis=-1)
        size = spec.level_sizes[level]
        repairable = np.array([c < spec.thresholds[level] for c in range(size + 1)])
        bad = (~repairable[counts]).astype(np.int64)
    return bad == 0


def _cover_sets(spec: TreeSpec) -> list[int]:
    """Leaf masks covered by every admissible S (S over non-root nodes)."""
    if spec.n_leaves > const.TREE_EXHAUSTIVE_MAX_LEAVES:
        raise LimitExceededError("leaf count", spec.n_leaves, const.TREE_EXHAUSTIVE_MAX_LEAVES)
    if spec.n_nodes > const.TREE_EXHAUSTIVE_MAX_NODES:
        raise LimitExceededError("node count", spec.n_nodes, const.TREE_EXHAUSTIVE_MAX_NODES)
    candidates = spec.nodes()[1:]
    masks = [spec.subtree_mask(node) for node in candidates]
    parents: dict[Node, list[int]] = {}
    for position, node in enumerate(candidates):
        parents.setdefault(node[:-1], []).append(position)
    covered = []
    for choice in range(1 << len(candidates)):
        if any(
            sum(choice >> position & 1 for position in siblings) >= spec.thresholds[len(parent)]
            for parent, siblings in parents.items()
        ):
            continue
        mask = 0
        for position, leaves in enumerate(masks):
            if choice >> position & 1:
                mask |= leaves
        covered.append(mask)
    return covered


def relatable_differences_bruteforce(spec: TreeSpec) -> np.ndarray:
    """relatable_differences by enumerating every S."""
    table = np.zeros(1 << spec.n_leaves, dtype=bool)
    table[np.array(sorted(set(_cover_sets(spec))), dtype=np.int64)] = True
    indices = np.arange(len(table), dtype=np.int64)
    for bit in range(spec.n_leaves):
        upper = indices[indices >> bit & 1 == 1]
        table[upper ^ (1 << bit)] |= table[upper]
    return table


def sim_related_bruteforce(x: int, y: int, spec: TreeSpec) -> bool:
    """sim_related by enumerating every S."""
    diff = _check_labeling(x, spec) ^ _check_labeling(y, spec)
    return any(diff & ~covered == 0 for covered in _cover_sets(spec))


# ----------------------------------------------------------------------
#  Claim checks
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class MsdsReport:
    """|A| against 2^{|T|-1} and the inclusion of the relation-neighborhood of A in B."""

    spec: TreeSpec
    size_a: int
    lower_bound: int
    size_b: int
    inclusion_holds: bool | None
    relation_cross_checked: bool | None
    counterexample: tuple[int, int] | None = None

    @property
    def size_holds(self) -> bool:
        """|A| >= 2^{|T|-1}."""
        return self.size_a >= self.lower_bound

    @property
    def passed(self) -> bool:
        """Every part that was checked holds."""
        return (
            self.size_holds
            and self.inclusion_holds is not False
            and self.relation_cross_checked is not False
        )

    def to_json(self) -> dict:
        """Serialize."""
        return {
            "spec": self.spec.to_json(),
            "size_a": self.size_a,
            "lower_bound": self.lower_bound,
            "size_b": self.size_b,
            "size_holds": self.size_holds,
            "inclusion_holds": self.inclusion_holds,
            "relation_cross_checked": self.relation_cross_checked,
            "counterexample": list(self.counterexample) if self.counterexample else None,
            "passed": self.passed,
        }


def claim_msds_check(spec: TreeSpec) -> MsdsReport:
    """Count A = {y : ybar(root) = 0} and B = {y : yhat(root) = 0}; on small trees
    check that every y related to some x in A lies in B."""
    if spec.n_leaves <= const.TREE_BRUTE_FORCE_MAX_LEAVES:
        in_a = ~_root_values(spec, _majority(spec))
        in_b = ~_root_values(spec, _shifted(spec))
        size_a, size_b = int(in_a.sum()), int(in_b.sum())
    else:
        size_a = count_root_zero(spec, _majority(spec))
        size_b = count_root_zero(spec, _shifted(spec))

    inclusion = cross_checked = None
    counterexample = None
    if (
        spec.n_leaves <= const.TREE_EXHAUSTIVE_MAX_LEAVES
        and spec.n_nodes <= const.TREE_EXHAUSTIVE_MAX_NODES
    ):
        relatable = relatable_differences(spec)
        cross_checked = bool(np.array_equal(relatable, relatable_differences_bruteforce(spec)))
        xs = np.flatnonzero(in_a)
        diffs = np.flatnonzero(relatable)
        ys = xs[:, None] ^ diffs[None, :]
        outside = ~in_b[ys]
        inclusion = not outside.any()
        if not inclusion:
            row, col = np.argwhere(outside)[0]
            counterexample = (int(xs[row]), int(ys[row, col]))
    else:
        LOGGER.info(
            "Tree with %d leaves and %d nodes: inclusion check skipped", spec.n_leaves, spec.n_nodes
        )
    report = MsdsReport(
        spec=spec,
        size_a=size_a,
        lower_bound=1 << (spec.n_leaves - 1),
        size_b=size_b,
        inclusion_holds=inclusion,
        relation_cross_checked=cross_checked,
        counterexample=counterexample,
    )
    if not report.passed:
        LOGGER.warning("Tree claim check failed for %s", spec.level_sizes)
    return report


# ----------------------------------------------------------------------
#  Binomial tail against its normal approximation
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class BerryEsseenCheck:
    """P[#ones < n/2 + delta sqrt(n)] - 1/2 against K(delta + (a - 1/2) sqrt(n) + 1/sqrt(n))."""

    a: float
    delta: float
    n: int
    k_const: float
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        """lhs - 1/2."""
        return self.lhs - 0.5

    @property
    def holds(self) -> bool:
        """Strict inequality."""
        return self.gap < self.rhs

    def to_json(self) -> dict:
        """Serialize."""
        return {**vars(self), "gap": self.gap, "holds": self.holds}


def berry_esseen_bound(a: Any, delta: Any, n: int, k_const: Any = const.DEFAULT_BERRY_ESSEEN_K) -> BerryEsseenCheck:
    """Evaluate both sides for n iid bits with P[0] = a."""
    a, delta, k_const = float(a), float(delta), float(k_const)
    if not 0.5 <= a <= 0.75:
        raise InvalidInputError("a must lie in [1/2, 3/4]")
    if delta < 0:
        raise InvalidInputError("delta must be non-negative")
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    if k_const < 1:
        raise InvalidInputError("K must be at least 1")
    root = math.sqrt(n)
    below = math.ceil(n / 2 + delta * root) - 1
    lhs = float(binom.cdf(below, n, 1 - a))
    rhs = k_const * (delta + (a - 0.5) * root + 1 / root)
    return BerryEsseenCheck(a, delta, n, k_const, lhs, rhs)


def pack_labeling(values: Sequence[int]) -> int:
    """Pack a 0/1 sequence in leaf order into a labeling."""
    result = 0
    for index, value in enumerate(values):
        if value not in (0, 1):
            raise InvalidInputError("labels must be 0 or 1")
        result |= value << index
    return result
