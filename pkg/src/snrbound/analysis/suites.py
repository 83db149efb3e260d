"""Named verification suites run by ``snrbound verify <suite>``.

A suite returns a list of reports and passes when every asserted report
passes. Exploratory reports (``asserted=False``) are kept in the output
but never fail a suite.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.special import iv

from snrbound import events
from snrbound.analysis.envelope import (
    envelope_violation_set,
    midpoint_dominance_check,
    random_sub_envelope_specs,
)
from snrbound.analysis.inequalities import (
    kummer_limit_gap,
    r_lower_bound,
    r_ratio,
    verify_envelope_below_mle,
    verify_h_properties,
    verify_inequality_r1,
    verify_ratio_monotonicity,
    verify_recurrence,
)
from snrbound.analysis.oracles import (
    bayes_ratio_quadrature,
    mp_bessel_i,
    mp_r_lower_bound,
    mp_r_ratio,
)
from snrbound.config import settings
from snrbound.estimators import describe, envelope, h_bu, h_radial_mixture, multiplier_values
from snrbound.grids import DEFAULT_T_GRID_DESCRIPTION, default_t_grid, default_z_grid, lambda_grid
from snrbound.models import (
    BallUniform,
    BoundaryUniform,
    EstimatorSpec,
    Mle,
    PointMass,
    Problem,
    RadialMixture,
    SampleConfig,
    Suite,
    Truncated,
    Unbiased,
    VerificationReport,
    Violation,
    spec_to_json,
)
from snrbound.risk import (
    Moments,
    chunk_stream,
    conditional_decomposition_check,
    mc_risk_difference,
    mc_risk_many,
)
from snrbound.specfun import bessel_i, langevin_mgf, scale_mixture_closed, scale_mixture_quad

logger = logging.getLogger(__name__)

BASELINE = Problem(p=5, k=20, m=2.0)
UNIVERSAL = Problem(p=8, k=10, m=2.0)

LANGEVIN_REPLICATES = 1_000_000
SCALE_MIXTURE_CASES = ((5.0, 1.5, 2.0, 3.0), (3.0, 0.5, 1.0, 2.0), (4.0, 2.5, 3.0, 5.0))
SCALE_MIXTURE_TOL = 1e-6
ORACLE_TOL = 1e-8
MIXTURE_ORACLE_TOL = 1e-6
NODE_STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class SuiteContext:
    """Inputs shared by every suite. ``problem=None`` selects the suite's default."""

    sample: SampleConfig
    problem: Problem | None = None
    workers: int | None = None


def _rel_gap(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _report(
    name: str,
    grid: str,
    violations: list[Violation],
    checks: int,
    *,
    asserted: bool = True,
    notes: str = "",
) -> VerificationReport:
    return VerificationReport.from_violations(
        name, grid, violations, checks=checks, asserted=asserted, notes=notes
    )


# --- specfun ---


def _langevin_mc(p: int, w: float, cfg: SampleConfig) -> Moments:
    total = Moments(count=0, mean=0.0, m2=0.0)
    chunk = min(cfg.chunk_size, LANGEVIN_REPLICATES)
    for index in range(-(-LANGEVIN_REPLICATES // chunk)):
        n = min(chunk, LANGEVIN_REPLICATES - index * chunk)
        g = chunk_stream(cfg.seed, index).standard_normal((n, p))
        u1 = g[:, 0] / np.linalg.norm(g, axis=1)
        total = total.merge(Moments.of(np.exp(w * u1)))
    return total


def specfun_suite(ctx: SuiteContext) -> list[VerificationReport]:
    reports = [verify_recurrence(), verify_ratio_monotonicity(12.5, 2.5)]

    limit = kummer_limit_gap()
    reports.append(
        _report(
            "kummer-ratio-limit",
            "z = 700, (a, b) = (12.5, 2.5)",
            [] if limit < 0.05 else [Violation(inputs={"z": 700.0}, lhs=limit, rhs=0.05)],
            1,
        )
    )

    violations = []
    cases = [(nu, z) for nu in (-0.5, 0.0, 0.5, 1.5, 3.0) for z in (0.5, 2.5, 10.0, 50.0)]
    for nu, z in cases:
        value = bessel_i(nu, z)
        for name, ref in (("scipy", float(iv(nu, z))), ("mpmath", float(mp_bessel_i(nu, z)))):
            if _rel_gap(value, ref) > 1e-12:
                violations.append(
                    Violation(inputs={"nu": nu, "z": z}, lhs=value, rhs=ref, relation=name)
                )
    reports.append(
        _report("bessel-oracle", f"{len(cases)} (nu, z) pairs", violations, 2 * len(cases))
    )

    violations = []
    for p in (2, 3, 5):
        for w in (0.5, 2.0, 5.0):
            mc = _langevin_mc(p, w, ctx.sample)
            exact = langevin_mgf(w, 1.0, p)
            if abs(mc.mean - exact) > settings.se_multiplier * mc.std_error:
                violations.append(
                    Violation(inputs={"p": p, "w": w}, lhs=mc.mean, rhs=exact,
                              relation="sphere MC == Langevin closed form")
                )
    reports.append(
        _report("langevin-mc", f"(p, w) in {{2,3,5}} x {{0.5,2,5}}, N={LANGEVIN_REPLICATES}",
                violations, 9)
    )

    violations = []
    for alpha, nu, mu, T in SCALE_MIXTURE_CASES:
        quad = scale_mixture_quad(alpha, nu, mu, T)
        closed = scale_mixture_closed(alpha, nu, mu, T)
        if _rel_gap(quad, closed) > SCALE_MIXTURE_TOL:
            violations.append(
                Violation(inputs={"alpha": alpha, "nu": nu, "mu": mu, "T": T}, lhs=quad,
                          rhs=closed, relation="quadrature == closed form")
            )
    reports.append(
        _report("scale-mixture-identity", f"{len(SCALE_MIXTURE_CASES)} (alpha, nu, mu, T) tuples",
                violations, len(SCALE_MIXTURE_CASES))
    )
    return reports


# --- h-properties ---


def h_properties_suite(ctx: SuiteContext) -> list[VerificationReport]:
    prob = ctx.problem or BASELINE
    reports = [verify_h_properties(prob)]
    for p in range(2, 7):
        for k in range(2, 7):
            for m in (0.5 * math.sqrt(p), math.sqrt(p), 2 * math.sqrt(p)):
                reports.append(verify_envelope_below_mle(Problem(p=p, k=k, m=m)))
    if ctx.problem is not None and (prob.p < 2 or prob.k < 2):
        reports.append(verify_envelope_below_mle(prob))
    return reports


# --- r1-inequality ---


def r1_inequality_suite(ctx: SuiteContext) -> list[VerificationReport]:
    reports = [verify_inequality_r1(p, k) for p in range(2, 11) for k in range(2, 11)]
    if ctx.problem is not None and (ctx.problem.p < 2 or ctx.problem.k < 2):
        reports.append(verify_inequality_r1(ctx.problem.p, ctx.problem.k))

    rng = np.random.default_rng(ctx.sample.seed)
    z_grid = default_z_grid()
    violations = []
    for _ in range(5):
        p, k = (int(v) for v in rng.integers(2, 11, size=2))
        z = float(rng.choice(z_grid))
        zs = np.array([z])
        pairs = (
            ("R(z)", float(r_ratio(p, k, zs)[0]), mp_r_ratio(p, k, z)),
            ("bound", float(r_lower_bound(p, k, zs)[0]), mp_r_lower_bound(p, k, z)),
        )
        for name, value, ref in pairs:
            if _rel_gap(value, ref) > ORACLE_TOL:
                violations.append(
                    Violation(inputs={"p": p, "k": k, "z": z}, lhs=value, rhs=ref, relation=name)
                )
    reports.append(_report("r1-oracle", "5 random (p, k, z) tuples", violations, 10))
    return reports


# --- decomposition ---


def decomposition_suite(ctx: SuiteContext) -> list[VerificationReport]:
    prob = ctx.problem or BASELINE
    specs: list[EstimatorSpec] = [Unbiased(), Mle(), BoundaryUniform()]
    lams = (0.0, prob.m / 2, prob.m)
    violations = []
    for spec in specs:
        for lam in lams:
            check = conditional_decomposition_check(
                spec, lam, prob, ctx.sample, workers=ctx.workers
            )
            if not check.passed:
                violations.append(
                    Violation(inputs={"lambda": lam}, lhs=check.lhs, rhs=check.rhs,
                              relation=f"{describe(spec)}: direct == decomposed")
                )
    return [
        _report(
            f"decomposition({prob.label()})",
            f"lambda in {{0, m/2, m}}, N={ctx.sample.replicates}",
            violations,
            len(specs) * len(lams),
        )
    ]


# --- dominance ---


def dominance_suite(ctx: SuiteContext) -> list[VerificationReport]:
    prob = ctx.problem or BASELINE
    t = default_t_grid()
    small_m = prob.m <= math.sqrt(prob.p)
    note = "" if small_m else "m > sqrt(p): the midpoint condition is only sufficient"
    reports = [
        midpoint_dominance_check(Unbiased(), Mle(), prob),
        midpoint_dominance_check(Mle(), BoundaryUniform(), prob),
        midpoint_dominance_check(BoundaryUniform(l=2.0), BoundaryUniform(), prob),
    ]
    reports[0] = reports[0].model_copy(update={"asserted": small_m, "notes": note})
    reports[1] = reports[1].model_copy(update={"asserted": small_m, "notes": note})

    mle_set = envelope_violation_set(Mle(), prob, t)
    truncated = Truncated(base=Mle())
    if small_m:
        mle = multiplier_values(Mle(), t, prob)
        env = envelope(t, prob)
        violations = [
            Violation(inputs={"t": float(ti)}, lhs=float(e), rhs=float(h),
                      relation="envelope <= h_mle")
            for ti, h, e in zip(t, mle, env, strict=True)
            if h < e - settings.grid_slack
        ]
        reports.append(
            _report(
                f"mle-envelope({prob.label()})",
                DEFAULT_T_GRID_DESCRIPTION,
                violations,
                t.size,
                asserted=prob.p >= 2,
                notes=f"{len(mle_set)} grid points strictly above the envelope; "
                "truncating the mle gives the envelope itself",
            )
        )
        ub_set = set(envelope_violation_set(Unbiased(), prob, t))
        missing = [v for v in t if v > 0 and float(v) not in ub_set]
        reports.append(
            _report(f"unbiased-envelope({prob.label()})", DEFAULT_T_GRID_DESCRIPTION,
                    [Violation(inputs={"t": float(v)}, lhs=1.0, rhs=float(envelope(v, prob)),
                               relation="envelope < 1") for v in missing],
                    t.size)
        )
    else:
        reports.append(
            _report(
                f"mle-envelope({prob.label()})",
                DEFAULT_T_GRID_DESCRIPTION,
                [] if mle_set else [Violation(inputs={"t": float("nan")}, lhs=0.0, rhs=1.0,
                                              relation="mle exceeds envelope somewhere")],
                t.size,
                notes=(
                    f"{len(mle_set)} grid points above the envelope, "
                    f"t in [{mle_set[0]:.4g}, {mle_set[-1]:.4g}]; "
                    f"dominating spec: {spec_to_json(truncated)}"
                    if mle_set
                    else ""
                ),
            )
        )

    capped = multiplier_values(truncated, t, prob)
    env = envelope(t, prob)
    reports.append(
        _report(
            f"truncation-below-envelope({prob.label()})",
            DEFAULT_T_GRID_DESCRIPTION,
            [
                Violation(inputs={"t": float(ti)}, lhs=float(c), rhs=float(e),
                          relation="truncated <= envelope")
                for ti, c, e in zip(t, capped, env, strict=True)
                if c > e + settings.grid_slack
            ],
            t.size,
        )
    )
    reports.append(_risk_ordering(prob, ctx, small_m))
    return reports


def _risk_ordering(prob: Problem, ctx: SuiteContext, small_m: bool) -> VerificationReport:
    pairs: list[tuple[EstimatorSpec, EstimatorSpec]] = [
        (Unbiased(), Mle()),
        (BoundaryUniform(l=2.0), BoundaryUniform()),
        (Mle(), Truncated(base=Mle())),
    ]
    if small_m:
        pairs.append((Mle(), BoundaryUniform()))
    lams = lambda_grid(prob, settings.lambda_points)
    violations = []
    for worse, better in pairs:
        for lam in lams:
            diff = mc_risk_difference(worse, better, float(lam), prob, ctx.sample,
                                      workers=ctx.workers)
            if not diff.within(settings.se_multiplier):
                violations.append(
                    Violation(inputs={"lambda": float(lam)}, lhs=diff.estimate,
                              rhs=-settings.se_multiplier * diff.std_error,
                              relation=f"R({describe(worse)}) - R({describe(better)}) >= -4 SE")
                )
    return _report(
        f"risk-ordering({prob.label()})",
        f"{len(lams)} lambda points in [0, m], N={ctx.sample.replicates}",
        violations,
        len(pairs) * len(lams),
    )


# --- radial-mixture ---


def radial_mixture_suite(ctx: SuiteContext) -> list[VerificationReport]:
    cases = ((Problem(p=5, k=20, m=2.0), 0.0), (Problem(p=3, k=20, m=3.0), -2.0))
    t_values = (0.1, 1.0, 10.0)
    oracle_violations = []
    bound_violations = []
    node_violations = []
    t = default_t_grid()
    for prob, l in cases:
        for tv in t_values:
            value = h_radial_mixture(tv, prob, l, BallUniform())
            ref = bayes_ratio_quadrature(tv, prob, l, BallUniform())
            if _rel_gap(value, ref) > MIXTURE_ORACLE_TOL:
                oracle_violations.append(
                    Violation(inputs={"p": prob.p, "m": prob.m, "l": l, "t": tv}, lhs=value,
                              rhs=ref, relation="h_ball == quadrature")
                )
        mix = h_radial_mixture(t, prob, l, BallUniform())
        caps = [h_bu(t, prob, l)] + ([envelope(t, prob)] if l < 0 else [])
        for cap in caps:
            for ti, hv, cv in zip(t, mix, cap, strict=True):
                if hv < 0 or hv > cv + settings.grid_slack:
                    bound_violations.append(
                        Violation(inputs={"p": prob.p, "l": l, "t": float(ti)}, lhs=float(hv),
                                  rhs=float(cv), relation="0 <= h_mix <= h_bu")
                    )
        fine = h_radial_mixture(t, prob, l, BallUniform(), n_nodes=256)
        for ti, hv, fv in zip(t, mix, fine, strict=True):
            if _rel_gap(hv, fv) > NODE_STABILITY_TOL:
                node_violations.append(
                    Violation(inputs={"p": prob.p, "l": l, "t": float(ti)}, lhs=float(hv),
                              rhs=float(fv), relation="128 nodes == 256 nodes")
                )

    point_violations = []
    points = (
        (Problem(p=5, k=20, m=2.0), 2.0),
        (Problem(p=3, k=20, m=3.0), 2.5),
    )
    for prob, r in points:
        mix = h_radial_mixture(t, prob, 0.0, PointMass(r=r))
        ref = h_bu(t, prob, 0.0, r)
        for ti, hv, rv in zip(t, mix, ref, strict=True):
            if _rel_gap(hv, rv) > 1e-12:
                point_violations.append(
                    Violation(inputs={"p": prob.p, "r": r, "t": float(ti)}, lhs=float(hv),
                              rhs=float(rv), relation="point mass == boundary uniform")
                )
    return [
        _report("radial-mixture-oracle", "t in {0.1, 1, 10}, (5,20,2,0) and (3,20,3,-2)",
                oracle_violations, len(cases) * len(t_values)),
        _report("radial-mixture-bounds", DEFAULT_T_GRID_DESCRIPTION, bound_violations,
                3 * t.size),
        _report("radial-mixture-nodes", DEFAULT_T_GRID_DESCRIPTION, node_violations,
                len(cases) * t.size),
        _report("radial-mixture-point-mass", DEFAULT_T_GRID_DESCRIPTION, point_violations,
                len(points) * t.size),
    ]


# --- universal ---


def universal_suite(ctx: SuiteContext, count: int = 20) -> list[VerificationReport]:
    prob = ctx.problem or UNIVERSAL
    applies = prob.m <= math.sqrt(prob.p / 2)
    specs: list[EstimatorSpec] = [*random_sub_envelope_specs(prob, count, ctx.sample.seed)]
    specs.append(RadialMixture(l=0.0, prior=BallUniform()))
    lams = lambda_grid(prob, settings.lambda_points)
    violations = []
    for lam in lams:
        for spec_index, point in enumerate(
            mc_risk_many(specs, float(lam), prob, ctx.sample, workers=ctx.workers)
        ):
            limit = prob.p + settings.se_multiplier * point.std_error
            if point.estimate > limit:
                violations.append(
                    Violation(inputs={"lambda": float(lam), "spec": spec_index},
                              lhs=point.estimate, rhs=limit, relation="R <= p + 4 SE")
                )
    return [
        _report(
            f"universal-dominance({prob.label()})",
            f"{count} sub-envelope multipliers and the ball-uniform Bayes rule, "
            f"{len(lams)} lambda points, N={ctx.sample.replicates}",
            violations,
            len(specs) * len(lams),
            asserted=applies,
            notes="" if applies else "m > sqrt(p/2): outside the universal dominance range",
        )
    ]


SUITES: dict[Suite, Callable[[SuiteContext], list[VerificationReport]]] = {
    Suite.SPECFUN: specfun_suite,
    Suite.H_PROPERTIES: h_properties_suite,
    Suite.R1_INEQUALITY: r1_inequality_suite,
    Suite.DECOMPOSITION: decomposition_suite,
    Suite.DOMINANCE: dominance_suite,
    Suite.RADIAL_MIXTURE: radial_mixture_suite,
    Suite.UNIVERSAL: universal_suite,
}


def run_suite(name: Suite | str, ctx: SuiteContext) -> list[VerificationReport]:
    suite = Suite(name)
    logger.info("Running verification suite %s", suite)
    reports = SUITES[suite](ctx)
    for report in reports:
        if report.blocking:
            events.emit(
                "analysis",
                "error",
                "report_failed",
                f"{report.name}: {len(report.violations)} violations",
                context={"suite": str(suite), "grid": report.grid_description},
            )
    events.emit(
        "analysis",
        "info",
        "suite_done",
        f"{suite}: {sum(r.passed for r in reports)}/{len(reports)} reports clean",
        context={"suite": str(suite), "passed": suite_passed(reports)},
    )
    return reports


def suite_passed(reports: list[VerificationReport]) -> bool:
    return not any(report.blocking for report in reports)
