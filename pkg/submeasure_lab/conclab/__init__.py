"""Concentration experiments on finite products and trees."""
from submeasure_lab.conclab.alpha import (
    AlphaResult,
    ConcentrationRow,
    FiniteSpace,
    ProbeReport,
    ProbeRow,
    alpha_auto,
    alpha_exact,
    alpha_sampled,
    concentration_function_check,
    covering_concentration_probe,
)
from submeasure_lab.conclab.tail import (
    Mode,
    Scenario,
    Selector,
    TailReport,
    TailRow,
    enumerate_points,
    exact_binomial_tail,
    fair_bits_scenario,
    mc_tail,
    sample_product,
)
from submeasure_lab.conclab.tree import (
    BerryEsseenCheck,
    MsdsReport,
    TreeSpec,
    berry_esseen_bound,
    claim_msds_check,
    count_root_zero,
    pack_labeling,
    relatable_differences,
    relatable_differences_bruteforce,
    sim_related,
    sim_related_bruteforce,
    ybar_extension,
    yhat_extension,
)

__all__ = [
    "AlphaResult",
    "BerryEsseenCheck",
    "ConcentrationRow",
    "FiniteSpace",
    "Mode",
    "MsdsReport",
    "ProbeReport",
    "ProbeRow",
    "Scenario",
    "Selector",
    "TailReport",
    "TailRow",
    "TreeSpec",
    "alpha_auto",
    "alpha_exact",
    "alpha_sampled",
    "berry_esseen_bound",
    "claim_msds_check",
    "concentration_function_check",
    "count_root_zero",
    "covering_concentration_probe",
    "enumerate_points",
    "exact_binomial_tail",
    "fair_bits_scenario",
    "mc_tail",
    "pack_labeling",
    "relatable_differences",
    "relatable_differences_bruteforce",
    "sample_product",
    "sim_related",
    "sim_related_bruteforce",
    "ybar_extension",
    "yhat_extension",
]
