"""Tests for multiplier rules, radial priors and estimator application."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from snrbound.analysis.oracles import mp_h_bu
from snrbound.errors import ConfigurationError, DomainError
from snrbound.estimators import (
    describe,
    envelope,
    estimate,
    h_best_equivariant,
    h_bu,
    h_mle,
    h_radial_mixture,
    mle_limit,
    multiplier,
    prior_mass_check,
    radial_nodes,
    statistic,
    two_sample_map,
    validate_prior,
    validate_spec,
)
from snrbound.estimators.multipliers import _h_bu_alternative
from snrbound.grids import default_t_grid
from snrbound.models import (
    Affine,
    BallUniform,
    BoundaryUniform,
    Mle,
    PointMass,
    Problem,
    Projected,
    RadialMixture,
    TabulatedMultiplier,
    TabulatedPrior,
    Truncated,
    Unbiased,
)

T = default_t_grid()


# --- h_mle ---


class TestMle:
    def test_one_at_threshold(self, bounded):
        assert h_mle(bounded.mle_threshold, bounded) == 1.0
        assert h_mle(0.0, bounded) == 1.0

    def test_limit_at_infinity(self, bounded):
        expected = (math.sqrt(26) - 1) / 12.5
        assert mle_limit(bounded) == pytest.approx(expected, rel=1e-12)
        assert h_mle(math.inf, bounded) == pytest.approx(expected, rel=1e-12)

    def test_nonincreasing_and_in_unit_interval(self, crossing):
        values = h_mle(T, crossing)
        assert np.all(np.diff(values) <= 0)
        assert np.all((values > 0) & (values <= 1))

    def test_shrinks_just_above_threshold(self, bounded):
        assert h_mle(bounded.mle_threshold * 1.5, bounded) < 1.0

    def test_negative_t_rejected(self, bounded):
        with pytest.raises(DomainError):
            h_mle(-1.0, bounded)


# --- h_bu ---


class TestBoundaryUniform:
    def test_value_at_zero(self, bounded):
        assert h_bu(0.0, bounded) == pytest.approx(0.8, rel=1e-15)

    def test_value_at_infinity(self, bounded):
        assert h_bu(math.inf, bounded) == pytest.approx(mp_h_bu(math.inf, bounded), rel=1e-12)

    @pytest.mark.parametrize("t", [0.01, 0.5, 3.0, 250.0])
    def test_matches_arbitrary_precision(self, crossing, t):
        assert h_bu(t, crossing, 1.5) == pytest.approx(mp_h_bu(t, crossing, 1.5), rel=1e-12)

    def test_strictly_decreasing(self, bounded):
        values = h_bu(T, bounded)
        assert np.all(np.diff(values) < 0)
        assert np.all(values > 0)

    def test_increasing_in_l(self, bounded):
        t = T[1:]
        assert np.all(h_bu(t, bounded, 1.0) > h_bu(t, bounded, 0.0))

    def test_increasing_in_radius(self, bounded):
        t = T[1:]
        assert np.all(h_bu(t, bounded, 0.0, 1.5) < h_bu(t, bounded, 0.0, 2.0))

    def test_alternative_form(self, crossing):
        t = T[1:]
        direct = h_bu(t, crossing, 2.0)
        alt = _h_bu_alternative(t, crossing, 2.0, crossing.m)
        np.testing.assert_allclose(alt, direct, rtol=1e-10)

    def test_at_most_one_when_m_small(self):
        prob = Problem(p=5, k=20, m=math.sqrt(5))
        values = h_bu(T, prob, 3.0)
        assert values[0] == pytest.approx(1.0, rel=1e-14)
        assert np.all(values[1:] < 1.0)

    def test_l_at_posterior_bound_rejected(self, bounded):
        with pytest.raises(ConfigurationError, match="k\\+p"):
            h_bu(1.0, bounded, l=25.0)

    def test_radius_above_m_rejected(self, bounded):
        with pytest.raises(ConfigurationError):
            h_bu(1.0, bounded, radius=2.5)

    def test_scalar_in_scalar_out(self, bounded):
        assert isinstance(h_bu(1.0, bounded), float)
        assert h_bu(np.array([1.0, 2.0]), bounded).shape == (2,)


def test_envelope_is_bu_l0(crossing):
    np.testing.assert_array_equal(envelope(T, crossing), h_bu(T, crossing, 0.0, crossing.m))


def test_best_equivariant(bounded):
    assert np.all(h_best_equivariant(T, bounded, 0.0) == 0.0)
    np.testing.assert_array_equal(h_best_equivariant(T, bounded, 1.0), h_bu(T, bounded, 0.0, 1.0))
    with pytest.raises(DomainError):
        h_best_equivariant(1.0, bounded, 2.5)


# --- Radial mixtures ---


class TestRadialMixture:
    def test_point_mass_at_m_is_bu(self, bounded):
        np.testing.assert_allclose(
            h_radial_mixture(T, bounded, 0.0, PointMass(r=2.0)), h_bu(T, bounded), rtol=1e-12
        )

    def test_point_mass_replaces_radius(self, small_p):
        np.testing.assert_allclose(
            h_radial_mixture(T, small_p, 0.0, PointMass(r=2.5)),
            h_bu(T, small_p, 0.0, 2.5),
            rtol=1e-12,
        )

    def test_ball_below_bu(self, bounded):
        value = h_radial_mixture(1.0, bounded, 0.0, BallUniform())
        assert 0 < value <= h_bu(1.0, bounded)

    def test_negative_l_below_envelope(self, small_p):
        values = h_radial_mixture(T, small_p, -2.0, BallUniform())
        assert np.all(values <= envelope(T, small_p) + 1e-12)

    def test_node_count_stable(self, bounded):
        coarse = h_radial_mixture(T, bounded, 0.0, BallUniform(), n_nodes=128)
        fine = h_radial_mixture(T, bounded, 0.0, BallUniform(), n_nodes=256)
        np.testing.assert_allclose(coarse, fine, rtol=1e-9)

    def test_tabulated_prior_of_ball(self, bounded):
        grid = np.linspace(0.0, 2.0, 2001)
        density = 5 * grid**4 / 32
        density /= trapezoid(density, grid)
        prior = TabulatedPrior(grid=tuple(grid), density=tuple(density))
        tab = h_radial_mixture(1.0, bounded, 0.0, prior)
        ball = h_radial_mixture(1.0, bounded, 0.0, BallUniform())
        assert tab == pytest.approx(ball, rel=1e-5)


class TestPriors:
    def test_ball_mass(self, bounded):
        assert prior_mass_check(BallUniform(), bounded) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass_nodes(self, bounded):
        r, w = radial_nodes(PointMass(r=1.5), bounded, 128)
        assert r.tolist() == [1.5]
        assert w.tolist() == [1.0]

    def test_zero_weight_nodes_dropped(self, bounded):
        prior = TabulatedPrior(grid=(0.0, 1.0, 2.0), density=(0.0, 0.0, 1.0))
        with pytest.raises(ConfigurationError):
            validate_prior(prior, bounded)
        r, _ = radial_nodes(prior, bounded, 32)
        assert np.all(r > 1.0)

    def test_support_outside_m(self, bounded):
        with pytest.raises(ConfigurationError, match="outside"):
            validate_prior(PointMass(r=2.5), bounded)

    def test_mass_not_one(self, bounded):
        prior = TabulatedPrior(grid=(0.0, 2.0), density=(1.0, 1.0))
        with pytest.raises(ConfigurationError, match="integrates"):
            validate_prior(prior, bounded)


# --- Dispatch ---


class TestMultiplier:
    def test_unbiased(self, bounded):
        assert np.all(multiplier(Unbiased(), T, bounded) == 1.0)

    def test_minimax_affine(self, bounded):
        assert multiplier(Affine(a=4 / 9), 3.0, bounded) == pytest.approx(4 / 9)

    def test_truncated_mle(self, crossing):
        expected = np.minimum(h_mle(T, crossing), envelope(T, crossing))
        np.testing.assert_array_equal(multiplier(Truncated(base=Mle()), T, crossing), expected)

    def test_projection_reflects(self, crossing):
        h1 = h_mle(T, crossing)
        env = envelope(T, crossing)
        reflected = multiplier(Projected(base=Mle(), weight=2.0), T, crossing)
        np.testing.assert_allclose(reflected, np.where(h1 > env, 2 * env - h1, h1), rtol=1e-14)

    def test_projection_weight_one_is_truncation(self, crossing):
        np.testing.assert_allclose(
            multiplier(Projected(base=Mle()), T, crossing),
            multiplier(Truncated(base=Mle()), T, crossing),
            rtol=1e-14,
        )

    def test_tabulated_interpolation(self, bounded):
        spec = TabulatedMultiplier(t=(0.0, 1.0, 2.0), h=(1.0, 0.5, 0.25))
        assert multiplier(spec, 0.5, bounded) == pytest.approx(0.75)
        assert multiplier(spec, 10.0, bounded) == 0.25
        assert multiplier(spec, math.inf, bounded) == 0.25

    def test_radial_mixture_dispatch(self, bounded):
        spec = RadialMixture(l=0.0, prior=BallUniform())
        assert multiplier(spec, 1.0, bounded) == pytest.approx(
            h_radial_mixture(1.0, bounded, 0.0, BallUniform()), rel=1e-14
        )

    def test_nested_validation(self, bounded):
        with pytest.raises(ConfigurationError):
            validate_spec(Truncated(base=BoundaryUniform(l=30.0)), bounded)

    def test_describe_labels(self):
        assert describe(Unbiased()) == "ub"
        assert describe(BoundaryUniform()) == "bu_l0"
        assert describe(BoundaryUniform(radius=2.5)) == "bu_l0_r2.5"
        assert describe(Truncated(base=Mle())) == "trunc_mle"
        assert describe(RadialMixture(l=-2.0, prior=BallUniform())) == "mix_ball_l-2"


# --- estimate / two-sample reduction ---


class TestEstimate:
    def test_unbiased_returns_x(self, bounded):
        x = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
        np.testing.assert_array_equal(estimate(Unbiased(), x, 2.0, bounded), x)

    def test_mle_identity_inside_space(self, bounded):
        x = np.full(5, 0.1)
        assert statistic(x, 1.0) <= bounded.mle_threshold
        np.testing.assert_array_equal(estimate(Mle(), x, 1.0, bounded), x)

    def test_bu_at_origin(self, bounded):
        np.testing.assert_array_equal(estimate(BoundaryUniform(), np.zeros(5), 1.0, bounded),
                                      np.zeros(5))

    def test_shrinks(self, bounded):
        x = np.array([3.0, 1.0, 0.0, 0.0, 0.0])
        assert np.linalg.norm(estimate(BoundaryUniform(), x, 1.0, bounded)) <= np.linalg.norm(x)

    @pytest.mark.parametrize("s2", [0.0, -1.0, math.nan])
    def test_bad_s2(self, bounded, s2):
        with pytest.raises(DomainError):
            estimate(Unbiased(), np.ones(5), s2, bounded)

    def test_wrong_length(self, bounded):
        with pytest.raises(DomainError):
            estimate(Unbiased(), np.ones(4), 1.0, bounded)


class TestTwoSample:
    def test_equal_samples(self):
        red = two_sample_map([1.0, 2.0], [1.0, 2.0], 3.0, 2.0)
        np.testing.assert_array_equal(red.x, [0.0, 0.0])
        assert red.s2 == 1.5
        assert red.m == pytest.approx(math.sqrt(2))

    def test_recombine_identity(self):
        x1 = np.array([3.0, -1.0, 2.0])
        red = two_sample_map(x1, [1.0, 1.0, 1.0], 1.0, 1.0)
        np.testing.assert_allclose(red.recombine(red.x), x1)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            two_sample_map([1.0, 2.0], [1.0], 1.0, 1.0)
