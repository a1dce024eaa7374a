"""Run configuration and input document models."""
from __future__ import annotations

from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator

from submeasure_lab import const
from submeasure_lab.algebra import AtomSet, GroundSet, Partition
from submeasure_lab.exact import EXACT_JSON_SCHEMA, Exact, PublishedSchema, exact_from_json
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError
from submeasure_lab.submeasure import (
    Submeasure,
    WeightedCoverFamily,
    example_easy,
    make_cover_generated,
    make_measure,
    make_table,
    tree_submeasure,
)
from submeasure_lab.utils import parse_rational


def _exact(value: Any) -> Exact:
    if isinstance(value, float):
        value = parse_rational(value)
    try:
        return exact_from_json(value)
    except InvalidInputError as err:
        raise ValueError(str(err)) from err


ExactValue = Annotated[Any, BeforeValidator(_exact), PublishedSchema(EXACT_JSON_SCHEMA)]
IndexList = list[Annotated[int, Field(ge=0)]]


class Command(StrEnum):
    """Subcommands."""

    COVNUM = "covnum"
    HPHI = "hphi"
    CLASSIFY = "classify"
    PATHOLOGY = "pathology"
    DIST = "dist"
    ENTROPY_CHECK = "entropy-check"
    CONCENTRATE = "concentrate"
    PROBE = "probe"
    EXAMPLE_EASY = "example-easy"
    EXAMPLE_PATHOLOGICAL = "example-pathological"


class OutputFormat(StrEnum):
    """Report format for tabular series."""

    CSV = "csv"
    JSON = "json"


class RunConfig(BaseModel):
    """Everything one invocation needs."""

    model_config = ConfigDict(validate_assignment=True)

    command: Command
    input: Path | None = None
    out: Path = Path(const.DEFAULT_OUTPUT_DIR)
    seed: int | None = None
    format: OutputFormat = OutputFormat.JSON
    trials: int | None = None
    xi_grid: list[str] | None = None
    epsilon: list[str] | None = None
    depth: int = 2
    max_atoms: int = const.DEFAULT_MAX_ATOMS
    sweep_limit: int = const.SUBSET_SWEEP_LIMIT
    trial_cap: int = const.DEFAULT_TRIAL_CAP
    mode: str | None = None
    name: str | None = None

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int | None) -> int | None:
        if value is not None and not 0 <= value < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return value

    @field_validator("max_atoms")
    @classmethod
    def _check_atoms(cls, value: int) -> int:
        if not 1 <= value <= const.HARD_MAX_ATOMS:
            raise ValueError(f"max atoms must lie in 1..{const.HARD_MAX_ATOMS}")
        return value

    @field_validator("sweep_limit")
    @classmethod
    def _check_sweep(cls, value: int) -> int:
        if not 1 <= value <= const.SUBSET_SWEEP_LIMIT:
            raise ValueError(f"sweep limit must lie in 1..{const.SUBSET_SWEEP_LIMIT}")
        return value

    @field_validator("trial_cap")
    @classmethod
    def _check_trial_cap(cls, value: int) -> int:
        if not const.MIN_MC_TRIALS <= value <= const.DEFAULT_TRIAL_CAP:
            raise ValueError(f"trial cap must lie in {const.MIN_MC_TRIALS}..{const.DEFAULT_TRIAL_CAP}")
        return value

    @field_validator("depth")
    @classmethod
    def _check_depth(cls, value: int) -> int:
        if value < 1:
            raise ValueError("depth must be at least 1")
        return value

    @field_validator("mode")
    @classmethod
    def _check_mode(cls, value: str | None) -> str | None:
        if value is not None and value not in ("bound", "explore"):
            raise ValueError("mode must be bound or explore")
        return value

    @field_validator("input")
    @classmethod
    def _check_input(cls, value: Path | None) -> Path | None:
        if value is not None and not value.is_file():
            raise ValueError(f"input file {value} does not exist")
        return value


# ----------------------------------------------------------------------
#  Submeasures
# ----------------------------------------------------------------------
class WeightedSet(BaseModel):
    """A set of atoms with a value."""

    set: IndexList
    value: ExactValue


class MeasureSpec(BaseModel):
    """Atom weights."""

    kind: Literal["measure"]
    atoms: list[ExactValue]


class TableSpec(BaseModel):
    """Explicit values; unlisted sets take the default."""

    kind: Literal["table"]
    n_atoms: int = Field(ge=1)
    values: list[WeightedSet]
    default: ExactValue | None = None


class CoverGeneratedSpec(BaseModel):
    """Weighted generators, whole space at fallback_weight."""

    kind: Literal["cover_generated"]
    n_atoms: int = Field(ge=1)
    generators: list[WeightedSet]
    fallback_weight: ExactValue


class ExampleEasySpec(BaseModel):
    """Truncated level-block construction; m_values lists M_1..M_{depth+1}."""

    kind: Literal["example_easy"]
    depth: int = Field(ge=1)
    m_values: list[int] | None = None


class TreeSubmeasureSpec(BaseModel):
    """Prefix cylinders of M_1 x ... x M_k, weights[i] for length-i prefixes."""

    kind: Literal["tree"]
    level_sizes: list[int]
    weights: list[ExactValue]


SubmeasureKind = Annotated[
    MeasureSpec | TableSpec | CoverGeneratedSpec | ExampleEasySpec | TreeSubmeasureSpec,
    Field(discriminator="kind"),
]


class SubmeasureSpec(BaseModel):
    """Discriminated by kind."""

    spec: SubmeasureKind

    def build(self, max_atoms: int = const.DEFAULT_MAX_ATOMS) -> Submeasure:
        """Construct the submeasure, enforcing the atom cap."""
        spec = self.spec
        if isinstance(spec, MeasureSpec):
            phi = make_measure(spec.atoms)
        elif isinstance(spec, TableSpec):
            ground = _ground(spec.n_atoms, max_atoms)
            values = {ground.atom_set(item.set).mask: item.value for item in spec.values}
            phi = make_table(ground, values, spec.default)
        elif isinstance(spec, CoverGeneratedSpec):
            ground = _ground(spec.n_atoms, max_atoms)
            generators = tuple((ground.atom_set(item.set), item.value) for item in spec.generators)
            phi = make_cover_generated(
                WeightedCoverFamily(generators, spec.fallback_weight, ground)
            )
        elif isinstance(spec, ExampleEasySpec):
            rule = None
            if spec.m_values is not None:
                m_values = spec.m_values
                if len(m_values) < spec.depth + 1:
                    raise InvalidInputError(f"m_values needs {spec.depth + 1} entries")
                rule = lambda level: m_values[level - 1]  # noqa: E731
            phi = example_easy(spec.depth, rule).submeasure
        else:
            phi = tree_submeasure(spec.level_sizes, spec.weights)
        if phi.ground.n_atoms > max_atoms:
            raise LimitExceededError("atom count", phi.ground.n_atoms, max_atoms)
        return phi


def _ground(n_atoms: int, max_atoms: int) -> GroundSet:
    if n_atoms > max_atoms:
        raise LimitExceededError("atom count", n_atoms, max_atoms)
    return GroundSet(n_atoms)


def parse_submeasure(raw: Any, max_atoms: int = const.DEFAULT_MAX_ATOMS) -> Submeasure:
    """Validate a submeasure document and build it."""
    return SubmeasureSpec(spec=raw).build(max_atoms)


# ----------------------------------------------------------------------
#  Command documents
# ----------------------------------------------------------------------
class FamilyDocument(BaseModel):
    """Input of covnum."""

    n_atoms: int = Field(ge=1)
    family: list[IndexList]

    def members(self, max_atoms: int) -> list[AtomSet]:
        """The family as AtomSets."""
        ground = _ground(self.n_atoms, max_atoms)
        return [ground.atom_set(entry) for entry in self.family]


class SubmeasureDocument(BaseModel):
    """Input of hphi, classify and pathology."""

    submeasure: dict[str, Any]
    xi_grid: list[ExactValue] | None = None
    threads: int | None = None


class DistDocument(BaseModel):
    """Input of dist: a weighted cover or a submeasure with a partition, and point pairs."""

    pairs: list[tuple[list[int], list[int]]]
    n_coords: int | None = None
    cover: list[IndexList] | None = None
    weights: list[ExactValue] | None = None
    submeasure: dict[str, Any] | None = None
    partition: list[IndexList] | None = None


class HerbstDocument(BaseModel):
    """One Herbst chain instance."""

    values: list[float]
    probabilities: list[float]
    variance_bound: float = Field(gt=0)
    lambda_grid: list[float]
    r_grid: list[float]


class EntropyDocument(BaseModel):
    """Input of entropy-check."""

    n_coords: int = Field(default=3, ge=1, le=4)
    alphabet: int = Field(default=2, ge=2)
    instances: int = Field(default=100, ge=1)
    points: int = Field(default=16, ge=2)
    ledoux_instances: int = Field(default=10_000, ge=1)
    herbst: list[HerbstDocument] = []


class ProbeDocument(BaseModel):
    """Input of probe."""

    submeasure: dict[str, Any]
    chain: list[list[IndexList]]
    epsilons: list[ExactValue] = []

    def partitions(self, phi: Submeasure) -> list[Partition]:
        """The chain as Partitions of phi's ground set."""
        return [Partition.from_indices(phi.ground, blocks) for blocks in self.chain]


class ThetaSpec(BaseModel):
    """theta = xi^exponent or 1/(1 + ln(1/xi))."""

    kind: Literal["power", "log"] = "power"
    exponent: float = 1.0


class TreeDocument(BaseModel):
    """One tree for the claim check."""

    level_sizes: list[int]
    thresholds: list[Any]


class BerryEsseenDocument(BaseModel):
    """One binomial comparison."""

    a: float
    delta: float
    n: int
    k: float = const.DEFAULT_BERRY_ESSEEN_K


class PathologicalDocument(BaseModel):
    """Input of example-pathological; every part has a default."""

    theta: ThetaSpec = ThetaSpec()
    levels: int = Field(default=3, ge=1, le=const.BERRY_ESSEEN_MAX_LEVELS)
    k: float = const.DEFAULT_BERRY_ESSEEN_K
    trees: list[TreeDocument] = [
        TreeDocument(level_sizes=[2, 2], thresholds=[1, 1]),
        TreeDocument(level_sizes=[3, 2], thresholds=[1, 1]),
    ]
    berry_esseen: list[BerryEsseenDocument] = [
        BerryEsseenDocument(a=0.51, delta=0.1, n=100),
    ]


class ReportEnvelope(BaseModel):
    """Every JSON report: what ran, with which seed, and the result."""

    command: Command
    version: str
    seed: int
    input: str | None = None
    generator: str = const.RNG_NAME
    result: dict[str, Any]
    warnings: list[str] = []
