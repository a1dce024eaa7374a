"""Covering numbers, submeasure classification and concentration of measure on finite algebras."""
import logging

from submeasure_lab.algebra import (
    AtomSet,
    Cover,
    GroundSet,
    MinCoverResult,
    Partition,
    covering_multiplicity,
    exhaustive_min_weight_cover,
    hit_counts,
    is_uniform,
    min_weight_cover,
    refine_partitions,
    uniform_refinement,
)
from submeasure_lab.const import VERSION
from submeasure_lab.exact import Exact, Surd, exact_from_json, exact_to_json, to_exact
from submeasure_lab.exceptions import (
    InfeasibleCoverError,
    InvalidInputError,
    LabError,
    LimitExceededError,
    NonUniformCoverError,
)
from submeasure_lab.metric import (
    BlockMetric,
    CoverMetric,
    ProductPoint,
    difference_set,
    dist_blocks,
    dist_cover,
    normalized_hamming,
)
from submeasure_lab.submeasure import (
    AtomMeasure,
    CoverGeneratedSubmeasure,
    Submeasure,
    TableSubmeasure,
    WeightedCoverFamily,
    audit_submeasure,
    example_easy,
    make_cover_generated,
    make_measure,
    make_table,
    tree_submeasure,
    zero_submeasure,
)

LOGGER = logging.getLogger(__name__)

__version__ = VERSION

__all__ = [
    "AtomMeasure",
    "AtomSet",
    "BlockMetric",
    "Cover",
    "CoverGeneratedSubmeasure",
    "CoverMetric",
    "Exact",
    "GroundSet",
    "InfeasibleCoverError",
    "InvalidInputError",
    "LabError",
    "LimitExceededError",
    "MinCoverResult",
    "NonUniformCoverError",
    "Partition",
    "ProductPoint",
    "Submeasure",
    "Surd",
    "TableSubmeasure",
    "WeightedCoverFamily",
    "audit_submeasure",
    "covering_multiplicity",
    "difference_set",
    "dist_blocks",
    "dist_cover",
    "exact_from_json",
    "exact_to_json",
    "example_easy",
    "exhaustive_min_weight_cover",
    "hit_counts",
    "is_uniform",
    "make_cover_generated",
    "make_measure",
    "make_table",
    "min_weight_cover",
    "normalized_hamming",
    "refine_partitions",
    "to_exact",
    "tree_submeasure",
    "uniform_refinement",
    "zero_submeasure",
]
