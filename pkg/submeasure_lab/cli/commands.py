"""One handler per subcommand."""
from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, TypeVar

import numpy as np
from pydantic import BaseModel

from submeasure_lab import const
from submeasure_lab.algebra import Cover, GroundSet, Partition
from submeasure_lab.cli.config import OutputStore
from submeasure_lab.cli.models import (
    Command,
    DistDocument,
    EntropyDocument,
    FamilyDocument,
    OutputFormat,
    PathologicalDocument,
    ProbeDocument,
    RunConfig,
    SubmeasureDocument,
    parse_submeasure,
)
from submeasure_lab.conclab import (
    FiniteSpace,
    Scenario,
    TailReport,
    TreeSpec,
    alpha_exact,
    alpha_sampled,
    berry_esseen_bound,
    claim_msds_check,
    concentration_function_check,
    covering_concentration_probe,
    mc_tail,
)
from submeasure_lab.covnum import classify, covering_number, default_grid, h_phi, pathology_index
from submeasure_lab.entropy import herbst_chain_check, random_ledoux_suite, random_shearer_suite
from submeasure_lab.exact import exact_to_json
from submeasure_lab.exceptions import InvalidInputError
from submeasure_lab.metric import BlockMetric, CoverMetric, normalized_hamming
from submeasure_lab.submeasure import (
    audit_submeasure,
    berry_esseen_params,
    example_easy,
    log_theta,
    power_theta,
)
from submeasure_lab.utils import parse_rational, read_json_document

LOGGER = logging.getLogger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)


@dataclass
class CommandOutput:
    """What a handler hands back for the report envelope."""

    result: dict[str, Any]
    warnings: list[str] = field(default_factory=list)
    seed: int = 0


@dataclass
class Context:
    """Per-invocation state shared by the handlers."""

    config: RunConfig
    store: OutputStore
    name: str

    @property
    def seed(self) -> int:
        """Seed flag, 0 when absent."""
        return self.config.seed if self.config.seed is not None else 0

    def raw_document(self, required: bool = True) -> Any:
        """Parsed JSON input, None when absent and optional."""
        if self.config.input is None:
            if required:
                raise InvalidInputError(f"{self.config.command} needs --input")
            return None
        return read_json_document(str(self.config.input))

    def document(self, model: type[DocumentT], required: bool = True) -> DocumentT:
        """Validated input document."""
        raw = self.raw_document(required)
        return model() if raw is None else model.model_validate(raw)

    def grid(self, fallback: list[Any] | None) -> list[Any] | None:
        """--xi-grid, else the document's grid."""
        if self.config.xi_grid:
            return [parse_rational(value) for value in self.config.xi_grid]
        return fallback

    def epsilons(self, fallback: list[Any]) -> list[Any]:
        """--epsilon, else the document's values."""
        if self.config.epsilon:
            return [parse_rational(value) for value in self.config.epsilon]
        return list(fallback)

    def table(self, header: tuple[str, ...], rows: list[list[Any]]) -> None:
        """Write a CSV table when CSV output was requested."""
        if self.config.format == OutputFormat.CSV:
            self.store.write_csv(self.name, header, rows)


def _float(value: Any) -> float:
    return float(value)


# ----------------------------------------------------------------------
#  Covering numbers
# ----------------------------------------------------------------------
def cmd_covnum(ctx: Context) -> CommandOutput:
    """Covering number of a set family."""
    doc = ctx.document(FamilyDocument)
    certificate = covering_number(doc.members(ctx.config.max_atoms))
    return CommandOutput({**certificate.to_json(), "verified": certificate.verify()})


def cmd_hphi(ctx: Context) -> CommandOutput:
    """h_phi over a grid."""
    doc = ctx.document(SubmeasureDocument)
    phi = parse_submeasure(doc.submeasure, ctx.config.max_atoms)
    grid = ctx.grid(doc.xi_grid) or default_grid(phi)
    results = [h_phi(phi, xi) for xi in grid]
    warnings = [
        f"h at xi = {float(result.xi):.6g} is a lower bound" for result in results if result.lower_bound
    ]
    ctx.table(
        ("xi", "h", "xi_h", "family_size", "lower_bound"),
        [
            [_float(r.xi), _float(r.value), _float(r.xi * r.value), r.family_size, r.lower_bound]
            for r in results
        ],
    )
    return CommandOutput({"kind": phi.kind, "rows": [r.to_json() for r in results]}, warnings)


def cmd_classify(ctx: Context) -> CommandOutput:
    """Verdict from h_phi on a grid."""
    doc = ctx.document(SubmeasureDocument)
    phi = parse_submeasure(doc.submeasure, ctx.config.max_atoms)
    report = classify(phi, ctx.grid(doc.xi_grid), threads=doc.threads)
    ctx.table(
        ("xi", "h", "xi_h", "resolvable", "christensen"),
        [
            [_float(xi), _float(h), _float(v), ok, c]
            for xi, h, v, ok, c in zip(
                report.xi_grid,
                report.h_values,
                report.xi_h_values,
                report.resolvable,
                report.christensen,
            )
        ],
    )
    return CommandOutput(report.to_json(), list(report.warnings))


def cmd_pathology(ctx: Context) -> CommandOutput:
    """Largest dominated measure, with an axiom audit."""
    doc = ctx.document(SubmeasureDocument)
    phi = parse_submeasure(doc.submeasure, ctx.config.max_atoms)
    audit = audit_submeasure(phi, seed=ctx.seed)
    index = pathology_index(phi, ctx.config.sweep_limit)
    warnings = [] if audit.passed else [f"not a submeasure: {audit.counterexample}"]
    return CommandOutput(
        {"pathology_index": index.to_json(), "audit": dataclasses.asdict(audit)}, warnings, ctx.seed
    )


# ----------------------------------------------------------------------
#  Metrics
# ----------------------------------------------------------------------
def cmd_dist(ctx: Context) -> CommandOutput:
    """Distances between point pairs."""
    doc = ctx.document(DistDocument)
    if doc.cover is not None:
        if doc.n_coords is None:
            raise InvalidInputError("a cover needs n_coords")
        cover = Cover.from_indices(GroundSet(doc.n_coords), doc.cover, doc.weights)
        metric: CoverMetric | BlockMetric = CoverMetric(cover)
        kind = "cover"
    elif doc.submeasure is not None and doc.partition is not None:
        phi = parse_submeasure(doc.submeasure, ctx.config.max_atoms)
        metric = BlockMetric(phi, Partition.from_indices(phi.ground, doc.partition))
        kind = "blocks"
    else:
        raise InvalidInputError("give either a cover or a submeasure with a partition")
    rows = []
    for x, y in doc.pairs:
        distance = metric(x, y)
        rows.append(
            {
                "x": x,
                "y": y,
                "distance": exact_to_json(distance),
                "hamming": exact_to_json(normalized_hamming(x, y)),
            }
        )
    ctx.table(
        ("pair", "distance", "hamming"),
        [[index, _float(metric(x, y)), _float(normalized_hamming(x, y))] for index, (x, y) in enumerate(doc.pairs)],
    )
    return CommandOutput({"metric": kind, "pairs": rows})


# ----------------------------------------------------------------------
#  Entropy
# ----------------------------------------------------------------------
def cmd_entropy_check(ctx: Context) -> CommandOutput:
    """Random Shearer and Ledoux suites plus optional Herbst chains."""
    doc = ctx.document(EntropyDocument, required=False)
    shearer = random_shearer_suite(doc.n_coords, doc.alphabet, doc.instances, ctx.seed)
    ledoux = random_ledoux_suite(doc.points, doc.ledoux_instances, ctx.seed)
    herbst = [
        herbst_chain_check(
            np.asarray(item.values),
            np.asarray(item.probabilities),
            item.variance_bound,
            item.lambda_grid,
            item.r_grid,
        )
        for item in doc.herbst
    ]
    warnings = []
    if shearer.violations:
        warnings.append(f"{shearer.violations} Shearer violation(s)")
    if ledoux.violations:
        warnings.append(f"{ledoux.violations} Ledoux violation(s)")
    warnings.extend(f"Herbst chain {i} broke" for i, report in enumerate(herbst) if report.failures)
    return CommandOutput(
        {
            "shearer": shearer.to_json(),
            "ledoux": ledoux.to_json(),
            "herbst": [report.to_json() for report in herbst],
        },
        warnings,
        ctx.seed,
    )


# ----------------------------------------------------------------------
#  Concentration
# ----------------------------------------------------------------------
def _scenario(ctx: Context) -> Scenario:
    raw = ctx.raw_document()
    if not isinstance(raw, dict):
        raise InvalidInputError("a scenario must be a JSON object")
    overrides = {
        "trials": ctx.config.trials,
        "seed": ctx.config.seed,
        "mode": ctx.config.mode,
        "epsilons": [float(e) for e in ctx.epsilons([])] or None,
    }
    return Scenario.model_validate({**raw, **{k: v for k, v in overrides.items() if v is not None}})


def cmd_concentrate(ctx: Context) -> CommandOutput:
    """Monte Carlo tail and, on small spaces, the concentration function."""
    scenario = _scenario(ctx)
    report: TailReport = mc_tail(scenario, trial_cap=ctx.config.trial_cap)
    result: dict[str, Any] = {"tail": report.to_json()}
    warnings = []
    if not report.certified:
        warnings.append("selector not certified 1-Lipschitz: bound column is not a guarantee")
    size = math.prod(scenario.alphabet_sizes)
    if scenario.epsilons and size <= const.ALPHA_SAMPLED_MAX_POINTS:
        space = FiniteSpace.from_scenario(scenario)
        if size <= const.ALPHA_EXACT_MAX_POINTS:
            alphas = alpha_exact(space, scenario.epsilons)
            result["concentration_check"] = [
                dataclasses.asdict(row) for row in concentration_function_check(scenario, scenario.r_grid)
            ]
        else:
            alphas = [alpha_sampled(space, eps, seed=scenario.seed) for eps in scenario.epsilons]
            warnings.append("alpha values are sampled lower bounds")
        result["alpha"] = [alpha.to_json() for alpha in alphas]
    elif scenario.epsilons:
        warnings.append(f"alpha skipped: {size} points exceed {const.ALPHA_SAMPLED_MAX_POINTS}")
    ctx.table(TailReport.csv_header, [[r.r, r.empirical, r.ci_lo, r.ci_hi, r.bound] for r in report.rows])
    return CommandOutput(result, warnings, scenario.seed)


def cmd_probe(ctx: Context) -> CommandOutput:
    """Concentration functions along a refining chain of partitions."""
    doc = ctx.document(ProbeDocument)
    phi = parse_submeasure(doc.submeasure, ctx.config.max_atoms)
    epsilons = ctx.epsilons(doc.epsilons)
    if not epsilons:
        raise InvalidInputError("probe needs at least one epsilon")
    report = covering_concentration_probe(phi, doc.partitions(phi), epsilons, ctx.seed)
    ctx.table(
        ("blocks", "epsilon", "alpha", "alpha_mode", "partition_bound", "certificate_bound", "bound"),
        [
            [
                row.blocks,
                row.epsilon,
                row.alpha,
                row.alpha_mode,
                row.partition_bound,
                row.certificate_bound,
                row.bound,
            ]
            for row in report.rows
        ],
    )
    return CommandOutput(report.to_json(), [report.note], ctx.seed)


# ----------------------------------------------------------------------
#  Examples
# ----------------------------------------------------------------------
def cmd_example_easy(ctx: Context) -> CommandOutput:
    """Block bound and domination checks for the truncated level-block construction."""
    example = example_easy(ctx.config.depth)
    n_atoms = example.index.ground.n_atoms
    if n_atoms <= const.SUBSET_SWEEP_LIMIT:
        checked, violations = example.exhaustive_domination_check()
        mode = "exhaustive"
    else:
        samples = ctx.config.trials or const.DEFAULT_DOMINATION_SAMPLES
        checked, violations = example.sample_domination_check(samples, ctx.seed)
        mode = "sampled"
    block_violations = example.check_block_bound()
    warnings = []
    if block_violations or violations:
        warnings.append(f"{len(block_violations)} block and {len(violations)} domination violation(s)")
    return CommandOutput(
        {
            "depth": example.depth,
            "n_atoms": n_atoms,
            "m_values": list(example.m_values),
            "xi": [exact_to_json(xi) for xi in example.xi],
            "measure_totals": [exact_to_json(mu.total()) for mu in example.measures],
            "block_violations": [list(v) for v in block_violations],
            "domination": {
                "mode": mode,
                "checked": checked,
                "violations": [[mask, level] for mask, level in violations[:20]],
                "violation_count": len(violations),
            },
        },
        warnings,
        ctx.seed,
    )


def cmd_example_pathological(ctx: Context) -> CommandOutput:
    """Prefix-cylinder parameters, tree claim checks and binomial comparisons."""
    doc = ctx.document(PathologicalDocument, required=False)
    theta = power_theta(doc.theta.exponent) if doc.theta.kind == "power" else log_theta()
    params = berry_esseen_params(theta, doc.levels, doc.k)
    checks = params.check()
    trees = [
        claim_msds_check(TreeSpec(tuple(item.level_sizes), tuple(item.thresholds)))
        for item in doc.trees
    ]
    comparisons = [berry_esseen_bound(item.a, item.delta, item.n, item.k) for item in doc.berry_esseen]
    warnings = [f"parameter check {key} failed" for key, ok in checks.items() if not ok]
    warnings.extend(f"tree {t.spec.level_sizes} failed" for t in trees if not t.passed)
    warnings.extend(f"binomial comparison n={c.n} failed" for c in comparisons if not c.holds)
    return CommandOutput(
        {
            "params": {**params.to_json(), "checks": checks},
            "trees": [t.to_json() for t in trees],
            "berry_esseen": [c.to_json() for c in comparisons],
        },
        warnings,
    )


HANDLERS: dict[Command, Callable[[Context], CommandOutput]] = {
    Command.COVNUM: cmd_covnum,
    Command.HPHI: cmd_hphi,
    Command.CLASSIFY: cmd_classify,
    Command.PATHOLOGY: cmd_pathology,
    Command.DIST: cmd_dist,
    Command.ENTROPY_CHECK: cmd_entropy_check,
    Command.CONCENTRATE: cmd_concentrate,
    Command.PROBE: cmd_probe,
    Command.EXAMPLE_EASY: cmd_example_easy,
    Command.EXAMPLE_PATHOLOGICAL: cmd_example_pathological,
}
