"""Radial priors for R = |theta|/sigma: quadrature nodes, weights and validation."""

from __future__ import annotations

import logging
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid

from snrbound.errors import ConfigurationError
from snrbound.models import BallUniform, PointMass, Problem, RadialPrior, TabulatedPrior
from snrbound.specfun import FloatArray

logger = logging.getLogger(__name__)

MASS_TOL = 1e-8
_SUPPORT_SLACK = 1e-12


@lru_cache(maxsize=16)
def _legendre(n_nodes: int) -> tuple[FloatArray, FloatArray]:
    nodes, weights = leggauss(n_nodes)
    return nodes, weights


def gauss_legendre(lo: float, hi: float, n_nodes: int) -> tuple[FloatArray, FloatArray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [lo, hi]."""
    x, w = _legendre(n_nodes)
    half = (hi - lo) / 2
    return lo + half * (x + 1), half * w


def _ball_density(r: FloatArray, prob: Problem) -> FloatArray:
    return prob.p * r ** (prob.p - 1) / prob.m**prob.p


def radial_nodes(
    prior: RadialPrior, prob: Problem, n_nodes: int
) -> tuple[FloatArray, FloatArray]:
    """Quadrature nodes r_j and prior weights pi_j so that E g(R) ~ sum_j pi_j g(r_j).

    Nodes with zero weight are dropped.
    """
    match prior:
        case PointMass(r=r):
            nodes, weights = np.array([r]), np.array([1.0])
        case BallUniform():
            nodes, gl = gauss_legendre(0.0, prob.m, n_nodes)
            weights = gl * _ball_density(nodes, prob)
        case TabulatedPrior(grid=grid, density=density):
            nodes, gl = gauss_legendre(grid[0], grid[-1], n_nodes)
            weights = gl * np.interp(nodes, grid, density)
    keep = weights > 0
    return nodes[keep], weights[keep]


def prior_mass_check(prior: RadialPrior, prob: Problem, n_nodes: int = 128) -> float:
    """Total mass of the prior under the rule used to validate it.

    Tabulated densities are integrated with the trapezoid rule on their own
    grid, which is exact for the piecewise-linear density they describe.
    """
    match prior:
        case PointMass():
            return 1.0
        case BallUniform():
            _, weights = radial_nodes(prior, prob, n_nodes)
            return float(weights.sum())
        case TabulatedPrior(grid=grid, density=density):
            return float(trapezoid(density, grid))
    raise ConfigurationError(f"unknown prior {prior!r}")


def validate_prior(prior: RadialPrior, prob: Problem) -> None:
    """Raise ConfigurationError unless the prior is a probability law on [0, m]."""
    limit = prob.m * (1 + _SUPPORT_SLACK)
    match prior:
        case PointMass(r=r) if r > limit:
            raise ConfigurationError(f"prior.r={r:g} lies outside [0, m={prob.m:g}]")
        case TabulatedPrior(grid=grid) if grid[-1] > limit:
            raise ConfigurationError(
                f"prior.grid reaches {grid[-1]:g}, outside [0, m={prob.m:g}]"
            )
        case _:
            pass
    mass = prior_mass_check(prior, prob)
    if abs(mass - 1.0) > MASS_TOL:
        raise ConfigurationError(f"prior.density integrates to {mass:.12g}, expected 1")
    logger.debug("prior %s validated (mass %.12g)", prior.kind, mass)
