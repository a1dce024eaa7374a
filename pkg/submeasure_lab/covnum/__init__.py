"""Covering numbers and the classification probe."""
from submeasure_lab.covnum.classify import (
    ClassificationReport,
    ConvergenceReport,
    Verdict,
    classify,
    convergence_diagnostic,
    default_grid,
)
from submeasure_lab.covnum.covering import (
    ChristensenGap,
    CoveringCertificate,
    HPhiResult,
    PathologyIndex,
    admissible_family,
    christensen_gap,
    covering_number,
    h_phi,
    maximal_members,
    pathology_index,
)
from submeasure_lab.covnum.lp import (
    Constraint,
    LPResult,
    LPStatus,
    RationalLP,
    Relation,
    Sense,
    make_lp,
    solve_lp,
)

__all__ = [
    "ChristensenGap",
    "ClassificationReport",
    "Constraint",
    "ConvergenceReport",
    "CoveringCertificate",
    "HPhiResult",
    "LPResult",
    "LPStatus",
    "PathologyIndex",
    "RationalLP",
    "Relation",
    "Sense",
    "Verdict",
    "admissible_family",
    "christensen_gap",
    "classify",
    "convergence_diagnostic",
    "covering_number",
    "default_grid",
    "h_phi",
    "make_lp",
    "maximal_members",
    "pathology_index",
    "solve_lp",
]
