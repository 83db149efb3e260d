"""Grid verification of the envelope, the kernel inequalities and the dominance results."""

from snrbound.analysis.envelope import (
    build_dominating_truncation,
    build_projection,
    envelope_violation_set,
    midpoint_dominance_check,
    random_sub_envelope_specs,
)
from snrbound.analysis.inequalities import (
    r_lower_bound,
    r_ratio,
    r_representation,
    verify_envelope_below_mle,
    verify_h_properties,
    verify_inequality_r1,
    verify_ratio_monotonicity,
    verify_recurrence,
)
from snrbound.analysis.suites import SUITES, SuiteContext, run_suite, suite_passed

__all__ = [
    "SUITES",
    "SuiteContext",
    "build_dominating_truncation",
    "build_projection",
    "envelope_violation_set",
    "midpoint_dominance_check",
    "r_lower_bound",
    "r_ratio",
    "r_representation",
    "random_sub_envelope_specs",
    "run_suite",
    "suite_passed",
    "verify_envelope_below_mle",
    "verify_h_properties",
    "verify_inequality_r1",
    "verify_ratio_monotonicity",
    "verify_recurrence",
]
