"""The envelope h(m, 0, t) and the dominating estimators built from it.

A multiplier that sits above the envelope on a set of t values is
dominated by its truncation at the envelope. Every check here is made on a
finite t grid, so a clean result means grid-verified and nothing more.
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Sequence

import numpy as np

from snrbound import events
from snrbound.config import settings
from snrbound.errors import DomainError, IdentityTruncationAdvisory
from snrbound.estimators import describe, envelope, multiplier_values, validate_spec
from snrbound.grids import DEFAULT_T_GRID_DESCRIPTION, default_t_grid
from snrbound.models import (
    EstimatorSpec,
    Problem,
    Projected,
    TabulatedMultiplier,
    Truncated,
    VerificationReport,
    Violation,
)
from snrbound.specfun import FloatArray

logger = logging.getLogger(__name__)

# Sub-envelope tables stay below this fraction of the envelope.
_SUB_ENVELOPE_CEILING = 0.98


def _grid(t_grid: Sequence[float] | FloatArray | None) -> FloatArray:
    arr = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    if np.isnan(arr).any() or (arr < 0).any():
        raise DomainError("t grid must be nonnegative")
    return arr


def envelope_violation_set(
    spec: EstimatorSpec,
    prob: Problem,
    t_grid: Sequence[float] | FloatArray | None = None,
) -> list[float]:
    """Grid points where the multiplier exceeds the envelope by more than the slack."""
    validate_spec(spec, prob)
    t = _grid(t_grid)
    h = multiplier_values(spec, t, prob)
    env = envelope(t, prob)
    above = h > env + settings.grid_slack
    return [float(v) for v in t[above]]


def midpoint_dominance_check(
    spec_a: EstimatorSpec,
    spec_b: EstimatorSpec,
    prob: Problem,
    t_grid: Sequence[float] | FloatArray | None = None,
    *,
    grid_description: str | None = None,
) -> VerificationReport:
    """Check h_A >= h_B and (h_A + h_B)/2 >= h(m, 0, t) at every grid t.

    A pass means B dominates A as far as the grid can tell.
    """
    validate_spec(spec_a, prob)
    validate_spec(spec_b, prob)
    t = _grid(t_grid)
    h_a = multiplier_values(spec_a, t, prob)
    h_b = multiplier_values(spec_b, t, prob)
    env = envelope(t, prob)
    slack = settings.grid_slack

    violations: list[Violation] = []
    for i in range(t.size):
        if h_a[i] < h_b[i] - slack:
            violations.append(
                Violation(
                    inputs={"t": float(t[i])},
                    lhs=float(h_b[i]),
                    rhs=float(h_a[i]),
                    relation="h_B <= h_A",
                )
            )
        midpoint = (h_a[i] + h_b[i]) / 2
        if midpoint < env[i] - slack:
            violations.append(
                Violation(
                    inputs={"t": float(t[i])},
                    lhs=float(env[i]),
                    rhs=float(midpoint),
                    relation="envelope <= (h_A + h_B)/2",
                )
            )
    return VerificationReport.from_violations(
        f"midpoint-dominance({describe(spec_a)} by {describe(spec_b)}, {prob.label()})",
        grid_description
        or (DEFAULT_T_GRID_DESCRIPTION if t_grid is None else f"{t.size} t points"),
        violations,
        checks=2 * t.size,
    )


def build_dominating_truncation(
    spec: EstimatorSpec,
    prob: Problem,
    t_grid: Sequence[float] | FloatArray | None = None,
) -> EstimatorSpec:
    """Truncated(spec), or ``spec`` itself with an advisory when it never exceeds the envelope."""
    violations = envelope_violation_set(spec, prob, t_grid)
    if not violations:
        message = f"{describe(spec)} never exceeds the envelope; truncation is the identity"
        warnings.warn(message, IdentityTruncationAdvisory, stacklevel=2)
        events.emit("analysis", "info", "identity_truncation", message)
        return spec
    logger.info(
        "%s exceeds the envelope at %d grid points (t in [%.4g, %.4g])",
        describe(spec),
        len(violations),
        violations[0],
        violations[-1],
    )
    return Truncated(base=spec)


def build_projection(spec: EstimatorSpec, prob: Problem, weight: float = 1.0) -> Projected:
    """Move ``spec`` towards the envelope where it exceeds it (weight 2 reflects it)."""
    validate_spec(spec, prob)
    return Projected(base=spec, weight=weight)


def random_sub_envelope_specs(
    prob: Problem,
    count: int,
    seed: int,
    *,
    n_points: int = 40,
) -> list[TabulatedMultiplier]:
    """Random tabulated multipliers with 0 <= h(t) <= h(m, 0, t) for every t.

    Node j takes u_j * envelope(t_{j+1}) (the last node uses the limit at
    infinity) with u_j uniform on [0, 0.98]. The envelope is decreasing, so
    linear interpolation and constant extrapolation stay below it.
    """
    rng = np.random.default_rng(seed)
    t = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, n_points - 1)))
    caps = envelope(np.concatenate((t[1:], [np.inf])), prob)
    specs = []
    for _ in range(count):
        u = rng.uniform(0.0, _SUB_ENVELOPE_CEILING, size=n_points)
        specs.append(TabulatedMultiplier(t=tuple(t.tolist()), h=tuple((u * caps).tolist())))
    return specs
