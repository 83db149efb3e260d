"""Grid verification of the inequalities and monotonicity properties behind dominance.

Strict monotonicity is checked as "no increase (decrease) beyond the grid
slack": differences below 1e-12 are not resolvable in double precision.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from snrbound.config import settings
from snrbound.estimators import envelope, h_mle
from snrbound.estimators.multipliers import _h_bu, _h_bu_alternative
from snrbound.grids import (
    DEFAULT_T_GRID_DESCRIPTION,
    DEFAULT_Z_GRID_DESCRIPTION,
    default_t_grid,
    default_z_grid,
)
from snrbound.models import Problem, VerificationReport, Violation
from snrbound.specfun import FloatArray, kummer_m, kummer_ratio

logger = logging.getLogger(__name__)

ALT_FORM_TOL = 1e-10
RECURRENCE_TOL = 1e-10
REPRESENTATION_TOL = 1e-10
ORIGIN_TOL = 1e-12

# h(t, prob, l, lam) on an array of t
HFunction = Callable[[FloatArray, Problem, float, float], FloatArray]


def _grid(values: Sequence[float] | FloatArray | None, default: FloatArray) -> FloatArray:
    return default if values is None else np.asarray(values, dtype=np.float64)


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# --- Lower bound on R(z) ---


def r_ratio(p: int, k: int, z: FloatArray) -> FloatArray:
    """R(z) = F((k+p)/2 + 1, p/2, z) / F((k+p)/2 + 1, p/2 + 1, z)."""
    a = (k + p) / 2 + 1
    return kummer_ratio(a, p / 2, a, p / 2 + 1, z)


def r_lower_bound(p: int, k: int, z: FloatArray) -> FloatArray:
    with np.errstate(divide="ignore"):
        return z / p * (np.sqrt(1 + 2 * (k + p) / z) + 1)


def r_representation(p: int, k: int, z: FloatArray) -> FloatArray:
    """1 + (2z/p) beta(z) with beta = (a/(p/2+1)) F(a+1, p/2+2, z) / F(a, p/2+1, z)."""
    a = (k + p) / 2 + 1
    beta = a / (p / 2 + 1) * kummer_ratio(a + 1, p / 2 + 2, a, p / 2 + 1, z)
    return 1 + 2 * z / p * beta


def verify_inequality_r1(
    p: int,
    k: int,
    z_grid: Sequence[float] | FloatArray | None = None,
) -> VerificationReport:
    """Check R(z) >= (z/p)(sqrt(1 + 2(k+p)/z) + 1) and the beta representation of R.

    Established for p >= 2 and k >= 2; smaller p or k are run as exploratory
    checks (``asserted=False``).
    """
    z = _grid(z_grid, default_z_grid())
    if (z <= 0).any():
        raise ValueError("z grid must be strictly positive")
    lhs = r_ratio(p, k, z)
    rhs = r_lower_bound(p, k, z)
    rep = r_representation(p, k, z)
    slack = settings.grid_slack

    violations: list[Violation] = []
    for zi, left, right, alt in zip(z, lhs, rhs, rep, strict=True):
        if right - left > slack * max(1.0, abs(right)):
            violations.append(
                Violation(
                    inputs={"z": float(zi)},
                    lhs=float(right),
                    rhs=float(left),
                    relation="bound <= R(z)",
                )
            )
        if _rel_gap(left, alt) > REPRESENTATION_TOL:
            violations.append(
                Violation(
                    inputs={"z": float(zi)},
                    lhs=float(left),
                    rhs=float(alt),
                    relation="R(z) == 1 + (2z/p) beta(z)",
                )
            )
    exploratory = p < 2 or k < 2
    return VerificationReport.from_violations(
        f"r1-inequality(p={p},k={k})",
        DEFAULT_Z_GRID_DESCRIPTION if z_grid is None else f"{z.size} z points",
        violations,
        checks=2 * z.size,
        asserted=not exploratory,
        notes="exploratory: p < 2 or k < 2" if exploratory else "",
    )


# --- Properties of h(lambda, l, t) ---


def _default_h(t: FloatArray, prob: Problem, l: float, lam: float) -> FloatArray:
    return _h_bu(t, prob, l, lam)


def default_l_grid(prob: Problem) -> list[float]:
    bound = prob.posterior_bound
    return [-2.0, 0.0, 1.0, 2.0, bound / 2, bound - 1.0]


def verify_h_properties(
    prob: Problem,
    l_grid: Sequence[float] | None = None,
    t_grid: Sequence[float] | FloatArray | None = None,
    lambda_grid: Sequence[float] | FloatArray | None = None,
    *,
    h: HFunction | None = None,
) -> VerificationReport:
    """Check h(lambda, l, t) on the full grid cross-product.

    Decreasing in t, increasing in lambda and in l for t > 0, equal to
    lambda^2/p at t = 0, bounded below by its limit at t = inf, and equal to
    its alternative form ((1+t)/t)(1 - F(c, p/2, zeta)/F(c+1, p/2, zeta)).
    ``h`` replaces the multiplier under test.
    """
    h_fn = h or _default_h
    ls = sorted(default_l_grid(prob) if l_grid is None else l_grid)
    t = np.sort(_grid(t_grid, default_t_grid()))
    lams = np.sort(_grid(lambda_grid, np.linspace(0.0, prob.m, 9)))
    slack = settings.grid_slack
    positive = t > 0

    values = np.array([[h_fn(t, prob, l, float(lam)) for l in ls] for lam in lams])
    violations: list[Violation] = []
    checks = 0

    def record(
        relation: str, lam: float, l: float, ti: float, lhs: float, rhs: float
    ) -> None:
        violations.append(
            Violation(
                inputs={"lambda": lam, "l": l, "t": ti}, lhs=lhs, rhs=rhs, relation=relation
            )
        )

    for i, lam in enumerate(lams):
        for j, l in enumerate(ls):
            row = values[i, j]
            # non-increasing in t
            for n in range(1, t.size):
                checks += 1
                if row[n] > row[n - 1] + slack:
                    record("h decreasing in t", lam, l, t[n], row[n], row[n - 1])
            # value at t = 0 and bounds
            origin = lam**2 / prob.p
            zero = np.flatnonzero(t == 0)
            for n in zero:
                checks += 1
                if abs(row[n] - origin) > ORIGIN_TOL * max(1.0, origin):
                    record("h(lambda, l, 0) == lambda^2/p", lam, l, 0.0, row[n], origin)
            floor = float(h_fn(np.array([np.inf]), prob, l, float(lam))[0])
            for n in range(t.size):
                checks += 1
                if row[n] > origin + slack or row[n] < floor - slack:
                    record("h(inf) <= h <= lambda^2/p", lam, l, t[n], row[n], origin)
            # alternative form
            if lam > 0:
                alt = _h_bu_alternative(t[positive], prob, l, float(lam))
                for ti, hv, av in zip(t[positive], row[positive], alt, strict=True):
                    checks += 1
                    if _rel_gap(hv, av) > ALT_FORM_TOL:
                        record("h == alternative form", lam, l, ti, hv, av)

    # increasing in lambda and in l, for t > 0
    for n in np.flatnonzero(positive):
        for j, l in enumerate(ls):
            for i in range(1, lams.size):
                checks += 1
                if values[i, j, n] < values[i - 1, j, n] - slack:
                    record(
                        "h increasing in lambda",
                        lams[i],
                        l,
                        t[n],
                        values[i - 1, j, n],
                        values[i, j, n],
                    )
        for i, lam in enumerate(lams):
            if lam == 0:
                continue
            for j in range(1, len(ls)):
                checks += 1
                if values[i, j, n] < values[i, j - 1, n] - slack:
                    record(
                        "h increasing in l",
                        lam,
                        ls[j],
                        t[n],
                        values[i, j - 1, n],
                        values[i, j, n],
                    )

    violations.sort(key=lambda v: (v.relation, v.inputs["lambda"], v.inputs["l"], v.inputs["t"]))
    return VerificationReport.from_violations(
        f"h-properties({prob.label()})",
        f"{len(lams)} lambda x {len(ls)} l x "
        + (DEFAULT_T_GRID_DESCRIPTION if t_grid is None else f"{t.size} t points"),
        violations,
        checks=checks,
    )


def verify_envelope_below_mle(
    prob: Problem,
    t_grid: Sequence[float] | FloatArray | None = None,
) -> VerificationReport:
    """Check h(m, 0, t) <= h_mle(t) for t >= m^2/(p+k).

    Established for p >= 2 and k >= 2; other problems are exploratory.
    """
    t = _grid(t_grid, default_t_grid())
    t = t[t >= prob.mle_threshold]
    env = envelope(t, prob)
    mle = h_mle(t, prob)
    slack = settings.grid_slack
    violations = [
        Violation(
            inputs={"t": float(ti)},
            lhs=float(e),
            rhs=float(h),
            relation="h(m, 0, t) <= h_mle(t)",
        )
        for ti, e, h in zip(t, env, mle, strict=True)
        if e > h + slack
    ]
    exploratory = prob.p < 2 or prob.k < 2
    return VerificationReport.from_violations(
        f"envelope-below-mle({prob.label()})",
        "t >= m^2/(p+k) from " + (DEFAULT_T_GRID_DESCRIPTION if t_grid is None else "given grid"),
        violations,
        checks=int(t.size),
        asserted=not exploratory,
        notes="exploratory: p < 2 or k < 2" if exploratory else "",
    )


# --- Ratios of Kummer functions ---


def verify_ratio_monotonicity(
    a: float,
    b: float,
    z_grid: Sequence[float] | FloatArray | None = None,
    a_grid: Sequence[float] | None = None,
) -> VerificationReport:
    """K_{a,b,0}(z) = F(a+1, b+1, z)/F(a+1, b, z) and K_{a,b,1}(z) = F(a, b, z)/F(a+1, b, z)
    non-increasing in z; H(a') = F(a', b+1, z)/F(a', b, z) non-increasing in a'.
    """
    z = np.sort(_grid(z_grid, np.arange(0.0, 50.0 + 1e-9, 0.5)))
    a_values = sorted(a_grid or [0.5, 1.0, 2.5, 5.0, a, 2 * a, 4 * a])
    slack = settings.grid_slack
    violations: list[Violation] = []
    checks = 0

    k0 = kummer_ratio(a + 1, b + 1, a + 1, b, z)
    k1 = kummer_ratio(a, b, a + 1, b, z)
    for name, ratio in (("K0 decreasing in z", k0), ("K1 decreasing in z", k1)):
        for n in range(1, z.size):
            checks += 1
            if ratio[n] > ratio[n - 1] + slack:
                violations.append(
                    Violation(
                        inputs={"a": a, "b": b, "z": float(z[n])},
                        lhs=float(ratio[n]),
                        rhs=float(ratio[n - 1]),
                        relation=name,
                    )
                )

    h_rows = np.array([kummer_ratio(av, b + 1, av, b, z) for av in a_values])
    for n in np.flatnonzero(z > 0):
        for i in range(1, len(a_values)):
            checks += 1
            if h_rows[i, n] > h_rows[i - 1, n] + slack:
                violations.append(
                    Violation(
                        inputs={"a": a_values[i], "b": b, "z": float(z[n])},
                        lhs=float(h_rows[i, n]),
                        rhs=float(h_rows[i - 1, n]),
                        relation="H decreasing in a",
                    )
                )
    return VerificationReport.from_violations(
        f"ratio-monotonicity(a={a:g},b={b:g})",
        f"{z.size} z points in [{z[0]:g}, {z[-1]:g}], a in {a_values}",
        violations,
        checks=checks,
    )


def verify_recurrence(
    a_values: Sequence[float] = (1.0, 5.0, 12.5),
    b_values: Sequence[float] = (1.5, 2.5),
    z_values: Sequence[float] = (0.1, 1.0, 10.0, 100.0),
) -> VerificationReport:
    """z F(a+1, b+1, z) == b [F(a+1, b, z) - F(a, b, z)] to relative 1e-10."""
    violations: list[Violation] = []
    for a in a_values:
        for b in b_values:
            for z in z_values:
                left = z * kummer_m(a + 1, b + 1, z)
                right = b * (kummer_m(a + 1, b, z) - kummer_m(a, b, z))
                if _rel_gap(left, right) > RECURRENCE_TOL:
                    violations.append(
                        Violation(
                            inputs={"a": a, "b": b, "z": z},
                            lhs=left,
                            rhs=right,
                            relation="z F(a+1,b+1,z) == b [F(a+1,b,z) - F(a,b,z)]",
                        )
                    )
    n = len(a_values) * len(b_values) * len(z_values)
    return VerificationReport.from_violations(
        "kummer-recurrence",
        f"{n} (a, b, z) tuples",
        violations,
        checks=n,
    )


def kummer_limit_gap(a: float = 12.5, b: float = 2.5, z: float = 700.0) -> float:
    """K_{a,b,0}(z), which behaves like b/z for large z."""
    value = kummer_ratio(a + 1, b + 1, a + 1, b, z)
    logger.debug("K(%g, %g, 0) at z=%g: %.6g (b/z = %.6g)", a, b, z, value, b / z)
    return value if math.isfinite(value) else math.inf
