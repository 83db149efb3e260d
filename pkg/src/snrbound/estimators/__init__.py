"""Equivariant estimators: multiplier rules, radial priors and application to data."""

from snrbound.estimators.apply import TwoSampleReduction, estimate, statistic, two_sample_map
from snrbound.estimators.multipliers import (
    describe,
    envelope,
    h_best_equivariant,
    h_bu,
    h_mle,
    h_radial_mixture,
    mle_limit,
    multiplier,
    multiplier_values,
    validate_spec,
)
from snrbound.estimators.priors import prior_mass_check, radial_nodes, validate_prior

__all__ = [
    "TwoSampleReduction",
    "describe",
    "envelope",
    "estimate",
    "h_best_equivariant",
    "h_bu",
    "h_mle",
    "h_radial_mixture",
    "mle_limit",
    "multiplier",
    "multiplier_values",
    "prior_mass_check",
    "radial_nodes",
    "statistic",
    "two_sample_map",
    "validate_prior",
    "validate_spec",
]
