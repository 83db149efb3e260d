"""Tests for envelope checks, kernel inequalities, oracles and the verification suites."""

from __future__ import annotations

import math

import numpy as np
import pytest

from snrbound import events
from snrbound.analysis import (
    SUITES,
    SuiteContext,
    build_dominating_truncation,
    build_projection,
    envelope_violation_set,
    midpoint_dominance_check,
    random_sub_envelope_specs,
    r_lower_bound,
    r_ratio,
    r_representation,
    run_suite,
    suite_passed,
    verify_envelope_below_mle,
    verify_h_properties,
    verify_inequality_r1,
    verify_ratio_monotonicity,
    verify_recurrence,
)
from snrbound.analysis.inequalities import kummer_limit_gap
from snrbound.analysis.oracles import (
    bayes_ratio_quadrature,
    log_hyp0f1,
    mp_h_bu,
    mp_r_lower_bound,
    mp_r_ratio,
)
from snrbound.config import settings
from snrbound.errors import DomainError, IdentityTruncationAdvisory
from snrbound.estimators import envelope, h_bu, h_mle, h_radial_mixture, multiplier
from snrbound.grids import default_t_grid
from snrbound.models import (
    BallUniform,
    BoundaryUniform,
    Mle,
    PointMass,
    Problem,
    Projected,
    SampleConfig,
    Suite,
    Truncated,
    Unbiased,
    VerificationReport,
    Violation,
)

T = default_t_grid()
SMALL_T = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 25), [np.inf]))


@pytest.fixture
def tiny_cfg() -> SampleConfig:
    return SampleConfig(replicates=4_000, seed=7, chunk_size=2_000)


# --- Envelope ---


class TestEnvelopeViolationSet:
    def test_mle_above_envelope_when_m_small(self, bounded):
        above = set(envelope_violation_set(Mle(), bounded))
        assert {float(v) for v in T if v <= bounded.mle_threshold} <= above
        assert np.all(h_mle(T, bounded) >= envelope(T, bounded) - 1e-12)

    def test_mle_crosses_when_m_large(self, crossing):
        above = envelope_violation_set(Mle(), crossing)
        assert above
        assert 0.0 not in above

    def test_unbiased_above_everywhere(self, bounded):
        assert len(envelope_violation_set(Unbiased(), bounded)) == T.size

    def test_envelope_itself_is_clean(self, crossing):
        assert envelope_violation_set(BoundaryUniform(), crossing) == []

    def test_negative_grid_rejected(self, bounded):
        with pytest.raises(DomainError):
            envelope_violation_set(Mle(), bounded, [-1.0, 1.0])


class TestMidpoint:
    def test_higher_l_dominated_by_envelope(self, bounded):
        report = midpoint_dominance_check(BoundaryUniform(l=2.0), BoundaryUniform(), bounded)
        assert report.passed
        assert report.checks == 2 * T.size

    def test_unbiased_dominated_by_mle_when_m_small(self, bounded):
        assert midpoint_dominance_check(Unbiased(), Mle(), bounded).passed

    def test_reversed_pair_fails(self, bounded):
        report = midpoint_dominance_check(BoundaryUniform(), Mle(), bounded)
        assert not report.passed
        assert {v.relation for v in report.violations} == {"h_B <= h_A"}

    def test_custom_grid_description(self, bounded):
        report = midpoint_dominance_check(Unbiased(), Mle(), bounded, [0.5, 1.0])
        assert report.grid_description == "2 t points"


class TestTruncation:
    def test_identity_advisory(self, bounded):
        with pytest.warns(IdentityTruncationAdvisory):
            spec = build_dominating_truncation(BoundaryUniform(), bounded)
        assert spec == BoundaryUniform()
        (event,) = events.get_events(category="analysis")
        assert event["event_type"] == "identity_truncation"

    def test_truncates_when_crossing(self, crossing):
        spec = build_dominating_truncation(Mle(), crossing)
        assert spec == Truncated(base=Mle())
        assert envelope_violation_set(spec, crossing) == []

    def test_projection(self, crossing):
        proj = build_projection(Mle(), crossing, 2.0)
        assert proj == Projected(base=Mle(), weight=2.0)
        assert envelope_violation_set(proj, crossing) == []


def test_random_sub_envelope_specs(crossing):
    specs = random_sub_envelope_specs(crossing, 5, seed=3)
    assert len(specs) == 5
    assert specs == random_sub_envelope_specs(crossing, 5, seed=3)
    for spec in specs:
        assert envelope_violation_set(spec, crossing) == []
        assert min(spec.h) >= 0


def test_sub_envelope_specs_below_between_nodes(bounded):
    (spec,) = random_sub_envelope_specs(bounded, 1, seed=0, n_points=6)
    t = np.linspace(0.0, 2000.0, 4001)
    assert np.all(multiplier(spec, t, bounded) <= envelope(t, bounded))


# --- Inequalities ---


class TestR1:
    @pytest.mark.parametrize("p,k", [(2, 2), (5, 20), (10, 3)])
    def test_holds(self, p, k):
        report = verify_inequality_r1(p, k)
        assert report.passed
        assert report.asserted

    def test_small_p_is_exploratory(self):
        report = verify_inequality_r1(1, 5)
        assert not report.asserted
        assert "exploratory" in report.notes

    def test_nonpositive_z_rejected(self):
        with pytest.raises(ValueError):
            verify_inequality_r1(5, 20, [0.0, 1.0])

    def test_representation_agrees(self):
        z = np.array([0.01, 1.0, 50.0])
        np.testing.assert_allclose(r_representation(4, 6, z), r_ratio(4, 6, z), rtol=1e-10)

    def test_against_arbitrary_precision(self):
        z = np.array([3.0])
        assert float(r_ratio(4, 6, z)[0]) == pytest.approx(mp_r_ratio(4, 6, 3.0), rel=1e-10)
        assert float(r_lower_bound(4, 6, z)[0]) == pytest.approx(
            mp_r_lower_bound(4, 6, 3.0), rel=1e-12
        )


class TestHProperties:
    def test_boundary_uniform_family(self, bounded):
        report = verify_h_properties(
            bounded, l_grid=[-2.0, 0.0, 3.0], t_grid=SMALL_T, lambda_grid=[0.0, 1.0, 2.0]
        )
        assert report.passed, report.violations[:3]
        assert report.checks > 0

    def test_detects_increasing_multiplier(self, bounded):
        def rising(t, prob, l, lam):
            return np.where(np.isinf(t), lam**2 / prob.p, lam**2 / prob.p * t / (1 + t))

        report = verify_h_properties(
            bounded, l_grid=[0.0], t_grid=SMALL_T, lambda_grid=[1.0], h=rising
        )
        assert not report.passed
        assert "h decreasing in t" in {v.relation for v in report.violations}

    def test_envelope_below_mle(self, crossing):
        assert verify_envelope_below_mle(crossing).passed

    def test_envelope_below_mle_k1_exploratory(self):
        report = verify_envelope_below_mle(Problem(p=3, k=1, m=1.0))
        assert not report.asserted


def test_ratio_monotonicity():
    assert verify_ratio_monotonicity(12.5, 2.5).passed


def test_recurrence():
    report = verify_recurrence()
    assert report.passed
    assert report.checks == 24


def test_kummer_limit_gap():
    gap = kummer_limit_gap()
    assert 0 < gap < 0.05


# --- Oracles ---


class TestOracles:
    def test_log_hyp0f1(self):
        assert log_hyp0f1(1.5, 0.0) == 0.0
        assert log_hyp0f1(0.5, 4.0) == pytest.approx(math.log(math.cosh(4.0)), rel=1e-13)

    def test_point_mass_quadrature(self, bounded):
        ref = bayes_ratio_quadrature(1.0, bounded, 0.0, PointMass(r=2.0))
        assert ref == pytest.approx(h_bu(1.0, bounded), rel=1e-8)

    def test_mp_h_bu(self, small_p):
        assert mp_h_bu(2.0, small_p, -2.0) == pytest.approx(h_bu(2.0, small_p, -2.0), rel=1e-12)

    @pytest.mark.slow
    @pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
    def test_ball_quadrature(self, bounded, t):
        ref = bayes_ratio_quadrature(t, bounded, 0.0, BallUniform())
        assert h_radial_mixture(t, bounded, 0.0, BallUniform()) == pytest.approx(ref, rel=1e-6)


# --- Suites ---


def _report(name, passed, asserted=True):
    violations = () if passed else (Violation(inputs={"t": 1.0}, lhs=1.0, rhs=0.0),)
    return VerificationReport(
        name=name, grid="g", passed=passed, violations=violations, asserted=asserted
    )


def test_suite_passed_ignores_exploratory():
    assert suite_passed([_report("a", True), _report("b", False, asserted=False)])
    assert not suite_passed([_report("a", True), _report("b", False)])


def test_every_suite_registered():
    assert set(SUITES) == set(Suite)


def test_run_suite_emits_events(tiny_cfg, bounded):
    reports = run_suite("decomposition", SuiteContext(sample=tiny_cfg, problem=bounded))
    assert suite_passed(reports)
    done = events.get_events(category="analysis")[-1]
    assert done["event_type"] == "suite_done"
    assert done["context"] == {"suite": "decomposition", "passed": True}


def test_run_suite_unknown_name(tiny_cfg):
    with pytest.raises(ValueError):
        run_suite("no-such-suite", SuiteContext(sample=tiny_cfg))


def test_r1_suite(tiny_cfg):
    reports = run_suite(Suite.R1_INEQUALITY, SuiteContext(sample=tiny_cfg))
    assert len(reports) == 82
    assert suite_passed(reports)


def test_dominance_suite_small_m(tiny_cfg, bounded):
    reports = run_suite(Suite.DOMINANCE, SuiteContext(sample=tiny_cfg, problem=bounded))
    by_name = {r.name.split("(")[0]: r for r in reports}
    assert by_name["mle-envelope"].passed
    assert by_name["unbiased-envelope"].passed
    assert all(r.asserted for r in reports)
    assert suite_passed(reports)


def test_dominance_suite_crossing(tiny_cfg, crossing):
    reports = run_suite(Suite.DOMINANCE, SuiteContext(sample=tiny_cfg, problem=crossing))
    mle_report = next(r for r in reports if r.name.startswith("mle-envelope"))
    assert mle_report.passed
    assert "truncated" in mle_report.notes
    exploratory = [r for r in reports if not r.asserted]
    assert len(exploratory) == 2
    assert suite_passed(reports)


def test_universal_outside_range_is_exploratory(tiny_cfg):
    from snrbound.analysis.suites import universal_suite

    (report,) = universal_suite(
        SuiteContext(sample=tiny_cfg, problem=Problem(p=5, k=20, m=3.0)), count=2
    )
    assert not report.asserted


def test_universal_suite_includes_bayes_rule(tiny_cfg):
    from snrbound.analysis.suites import universal_suite

    (report,) = universal_suite(SuiteContext(sample=tiny_cfg), count=2)
    assert report.asserted
    assert report.passed
    assert report.checks == 3 * settings.lambda_points
    assert "ball-uniform Bayes rule" in report.grid_description


@pytest.mark.slow
@pytest.mark.parametrize("suite", [Suite.H_PROPERTIES, Suite.RADIAL_MIXTURE, Suite.UNIVERSAL])
def test_grid_suites_pass(suite):
    ctx = SuiteContext(sample=SampleConfig(replicates=100_000, chunk_size=25_000))
    assert suite_passed(run_suite(suite, ctx))


@pytest.mark.slow
def test_specfun_suite():
    ctx = SuiteContext(sample=SampleConfig(replicates=1_000, seed=11))
    reports = run_suite(Suite.SPECFUN, ctx)
    assert suite_passed(reports), [r.name for r in reports if r.blocking]
