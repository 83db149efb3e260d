"""Tests for Pydantic data models."""

from __future__ import annotations

import json
import math

import pytest
from pydantic import ValidationError

from snrbound.models import (
    BallUniform,
    BoundaryUniform,
    EstimatorKind,
    GridSpec,
    Mle,
    PointMass,
    Problem,
    RadialMixture,
    RiskCurve,
    RiskPoint,
    RunConfig,
    SampleConfig,
    Suite,
    TabulatedMultiplier,
    TabulatedPrior,
    Truncated,
    Unbiased,
    VerificationReport,
    Violation,
    parse_spec,
    spec_to_json,
)


def test_problem_derived_quantities():
    prob = Problem(p=5, k=20, m=2.0)
    assert prob.gamma == 6.25
    assert prob.mle_threshold == pytest.approx(0.16)
    assert prob.posterior_bound == 25
    assert prob.label() == "p=5,k=20,m=2"


@pytest.mark.parametrize("fields", [{"p": 0, "k": 1, "m": 1.0}, {"p": 1, "k": 0, "m": 1.0},
                                    {"p": 1, "k": 1, "m": 0.0}, {"p": 1, "k": 1, "m": math.inf}])
def test_problem_rejects_invalid(fields):
    with pytest.raises(ValidationError):
        Problem(**fields)


def test_problem_is_frozen():
    prob = Problem(p=5, k=20, m=2.0)
    with pytest.raises(ValidationError):
        prob.p = 6


# --- Estimator specs ---


def test_spec_json_forms():
    spec = parse_spec('{"kind": "truncated", "base": {"kind": "mle"}}')
    assert spec == Truncated(base=Mle())
    assert parse_spec(spec_to_json(spec)) == spec


def test_nested_prior_inside_spec():
    spec = parse_spec({"kind": "radial_mixture", "l": -2, "prior": {"kind": "ball_uniform"}})
    assert isinstance(spec, RadialMixture)
    assert spec.prior == BallUniform()


def test_spec_kinds_cover_enum():
    kinds = {
        Unbiased().kind,
        Mle().kind,
        BoundaryUniform().kind,
        Truncated(base=Unbiased()).kind,
        TabulatedMultiplier(t=(0.0,), h=(1.0,)).kind,
    }
    assert kinds <= {str(k) for k in EstimatorKind}


def test_unknown_kind_rejected():
    with pytest.raises(ValidationError):
        parse_spec({"kind": "james_stein"})


def test_extra_field_rejected():
    with pytest.raises(ValidationError):
        parse_spec({"kind": "mle", "radius": 1.0})


def test_bu_radius_must_be_positive():
    with pytest.raises(ValidationError):
        BoundaryUniform(radius=0.0)


class TestTabulated:
    def test_negative_values_rejected(self):
        with pytest.raises(ValidationError, match="nonnegative"):
            TabulatedMultiplier(t=(0.0, 1.0), h=(0.5, -0.1))

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValidationError):
            TabulatedMultiplier(t=(0.0, 2.0, 1.0), h=(1.0, 1.0, 1.0))

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            TabulatedMultiplier(t=(0.0, 1.0), h=(1.0,))

    def test_prior_needs_two_points(self):
        with pytest.raises(ValidationError):
            TabulatedPrior(grid=(0.0,), density=(1.0,))

    def test_prior_negative_density(self):
        with pytest.raises(ValidationError):
            TabulatedPrior(grid=(0.0, 1.0), density=(1.0, -1.0))


def test_point_mass_positive():
    with pytest.raises(ValidationError):
        PointMass(r=0.0)


# --- Monte Carlo models ---


class TestSampleConfig:
    def test_chunk_size_clamped(self):
        cfg = SampleConfig(replicates=100, chunk_size=1000)
        assert cfg.chunk_size == 100
        assert cfg.n_chunks == 1

    def test_chunk_sizes_cover_replicates(self):
        cfg = SampleConfig(replicates=10_001, chunk_size=2_500)
        assert cfg.chunk_sizes() == [2500, 2500, 2500, 2500, 1]
        assert sum(cfg.chunk_sizes()) == 10_001

    def test_zero_replicates_rejected(self):
        with pytest.raises(ValidationError):
            SampleConfig(replicates=0)

    def test_seed_is_64_bit(self):
        SampleConfig(seed=2**64 - 1)
        with pytest.raises(ValidationError):
            SampleConfig(seed=2**64)


def test_risk_point_alias():
    pt = RiskPoint.model_validate({"lambda": 1.0, "estimate": 4.2, "std_error": 0.01,
                                   "replicates": 10})
    assert pt.lam == 1.0
    assert pt.model_dump(by_alias=True)["lambda"] == 1.0


def test_risk_curve_grid_checks():
    prob = Problem(p=5, k=20, m=2.0)
    pts = [RiskPoint(lam=v, estimate=5.0, std_error=0.1, replicates=10) for v in (0.0, 1.0)]
    curve = RiskCurve(problem=prob, spec=Unbiased(), points=tuple(pts))
    assert curve.lambdas == [0.0, 1.0]
    with pytest.raises(ValidationError):
        RiskCurve(problem=prob, spec=Unbiased(), points=(pts[1], pts[0]))
    beyond = RiskPoint(lam=2.5, estimate=5.0, std_error=0.1, replicates=10)
    with pytest.raises(ValidationError):
        RiskCurve(problem=prob, spec=Unbiased(), points=(pts[0], beyond))


# --- Verification reports ---


class TestVerificationReport:
    def test_passed_iff_no_violations(self):
        with pytest.raises(ValidationError):
            VerificationReport(name="x", grid="g", passed=True,
                               violations=(Violation(inputs={"t": 1.0}, lhs=2.0, rhs=1.0),))

    def test_from_violations(self):
        report = VerificationReport.from_violations("x", "g", [], checks=3)
        assert report.passed
        assert not report.blocking

    def test_exploratory_failure_not_blocking(self):
        v = Violation(inputs={"z": 0.5}, lhs=1.0, rhs=0.5)
        report = VerificationReport.from_violations("x", "g", [v], checks=1, asserted=False)
        assert not report.passed
        assert not report.blocking

    def test_json_uses_grid_key_and_infinity(self):
        v = Violation(inputs={"t": math.inf}, lhs=1.0, rhs=0.5)
        report = VerificationReport.from_violations("x", "t grid", [v], checks=1)
        data = json.loads(report.model_dump_json(by_alias=True))
        assert data["grid"] == "t grid"
        assert data["violations"][0]["inputs"]["t"] == "Infinity"


# --- CLI config ---


class TestRunConfig:
    def _base(self, **overrides):
        data = {"problem": {"p": 5, "k": 20, "m": 2.0}, "specs": [{"kind": "mle"}]}
        data.update(overrides)
        return data

    def test_defaults(self):
        cfg = RunConfig.model_validate(self._base())
        assert cfg.sample.replicates > 0
        assert cfg.workers == 1

    def test_l_at_bound_rejected(self):
        with pytest.raises(ValidationError, match="posterior"):
            RunConfig.model_validate(self._base(specs=[{"kind": "boundary_uniform", "l": 25}]))

    def test_lambda_grid_beyond_m(self):
        with pytest.raises(ValidationError, match="exceeds"):
            RunConfig.model_validate(self._base(lambda_grid={"lo": 0, "hi": 3, "n": 4}))

    def test_negative_lambda_grid(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate(self._base(lambda_grid={"lo": -1, "hi": 1, "n": 3}))

    def test_needs_a_spec(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate(self._base(specs=[]))


def test_grid_spec_log_needs_positive_lo():
    with pytest.raises(ValidationError):
        GridSpec(lo=0.0, hi=1.0, n=5, log=True)


def test_suite_names():
    assert Suite("r1-inequality") is Suite.R1_INEQUALITY
    assert len(Suite) == 7
