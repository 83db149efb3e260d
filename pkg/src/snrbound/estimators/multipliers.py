"""Multiplier rules h(t) of the equivariant estimators h(|x|^2/s^2) x.

Every function accepts a scalar t or a numpy array of t values (t = inf is
the limit as the statistic grows) and returns a float or an array of the
same shape.
"""

from __future__ import annotations

import logging
import math
from typing import overload

import numpy as np
from scipy.special import logsumexp

from snrbound.config import settings
from snrbound.errors import ConfigurationError, DomainError
from snrbound.estimators.priors import radial_nodes, validate_prior
from snrbound.models import (
    Affine,
    BallUniform,
    BoundaryUniform,
    EstimatorSpec,
    Mle,
    PointMass,
    Problem,
    Projected,
    RadialMixture,
    RadialPrior,
    TabulatedMultiplier,
    TabulatedPrior,
    Truncated,
    Unbiased,
)
from snrbound.specfun import FloatArray, kummer_ratio, paired_log_kummer

logger = logging.getLogger(__name__)

# Rows of t evaluated together against all radial nodes.
_MIXTURE_BLOCK = 2048
_RADIUS_SLACK = 1e-12


def _t_array(t: float | FloatArray) -> FloatArray:
    arr = np.asarray(t, dtype=np.float64)
    if np.isnan(arr).any() or (arr < 0).any():
        raise DomainError(f"t must be >= 0, got {t!r}")
    return arr


def _shaped(values: FloatArray, t: float | FloatArray) -> float | FloatArray:
    return float(values) if np.ndim(t) == 0 else values


def _t_fraction(t: FloatArray) -> FloatArray:
    """t/(1+t), equal to 1 at t = inf."""
    with np.errstate(invalid="ignore"):
        return np.where(np.isinf(t), 1.0, t / (1.0 + t))


def _check_l(l: float, prob: Problem) -> None:
    if l >= prob.posterior_bound:
        raise ConfigurationError(
            f"l={l:g} must be < k+p={prob.posterior_bound}: "
            "the posterior does not exist for l >= k+p"
        )


# --- MLE ---


def mle_limit(prob: Problem) -> float:
    """Limit of h_mle(t) as t -> inf: (sqrt(1 + 4 gamma) - 1) / (2 gamma)."""
    gamma = prob.gamma
    return (math.sqrt(1 + 4 * gamma) - 1) / (2 * gamma)


def _h_mle(t: FloatArray, prob: Problem) -> FloatArray:
    shrink = t > prob.mle_threshold
    safe_t = np.where(shrink, t, 1.0)
    with np.errstate(invalid="ignore"):
        q = np.where(np.isinf(safe_t), 1.0, (1.0 + safe_t) / safe_t)
    coef = prob.m**2 / (2 * (prob.p + prob.k))
    value = coef * (np.sqrt(1.0 + 4.0 * prob.gamma * q) - 1.0)
    return np.where(shrink, np.minimum(value, 1.0), 1.0)


@overload
def h_mle(t: float, prob: Problem) -> float: ...
@overload
def h_mle(t: FloatArray, prob: Problem) -> FloatArray: ...
def h_mle(t: float | FloatArray, prob: Problem) -> float | FloatArray:
    """Multiplier of the restricted maximum likelihood estimator.

    Equals 1 for t <= m^2/(p+k), where x itself lies in the parameter space.
    """
    return _shaped(_h_mle(_t_array(t), prob), t)


# --- Boundary-uniform Bayes rules ---


def _h_bu(t: FloatArray, prob: Problem, l: float, radius: float) -> FloatArray:
    c = (prob.k + prob.p - l) / 2
    zeta = radius**2 * _t_fraction(t) / 2
    ratio = kummer_ratio(c + 1, prob.p / 2 + 1, c + 1, prob.p / 2, zeta)
    return np.asarray(radius**2 / prob.p * ratio, dtype=np.float64)


@overload
def h_bu(t: float, prob: Problem, l: float = ..., radius: float | None = ...) -> float: ...
@overload
def h_bu(
    t: FloatArray, prob: Problem, l: float = ..., radius: float | None = ...
) -> FloatArray: ...
def h_bu(
    t: float | FloatArray,
    prob: Problem,
    l: float = 0.0,
    radius: float | None = None,
) -> float | FloatArray:
    """Bayes multiplier for theta | sigma uniform on the sphere of radius ``radius``*sigma.

    h = (radius^2/p) F(c+1, p/2+1, zeta) / F(c+1, p/2, zeta), with
    c = (k+p-l)/2 and zeta = radius^2 t / (2(1+t)). ``radius`` defaults to m.
    """
    _check_l(l, prob)
    radius = prob.m if radius is None else radius
    if radius <= 0 or radius > prob.m * (1 + _RADIUS_SLACK):
        raise ConfigurationError(f"radius={radius:g} must lie in (0, m={prob.m:g}]")
    return _shaped(_h_bu(_t_array(t), prob, l, radius), t)


@overload
def envelope(t: float, prob: Problem) -> float: ...
@overload
def envelope(t: FloatArray, prob: Problem) -> FloatArray: ...
def envelope(t: float | FloatArray, prob: Problem) -> float | FloatArray:
    """h(m, 0, t): multiplier of the boundary-uniform rule with l = 0."""
    return _shaped(_h_bu(_t_array(t), prob, 0.0, prob.m), t)


@overload
def h_best_equivariant(t: float, prob: Problem, lam: float) -> float: ...
@overload
def h_best_equivariant(t: FloatArray, prob: Problem, lam: float) -> FloatArray: ...
def h_best_equivariant(t: float | FloatArray, prob: Problem, lam: float) -> float | FloatArray:
    """Multiplier of the best equivariant estimator at a fixed lambda: h(lambda, 0, t).

    Zero at lambda = 0.
    """
    arr = _t_array(t)
    if lam == 0:
        return _shaped(np.zeros_like(arr), t)
    if not 0 < lam <= prob.m * (1 + _RADIUS_SLACK):
        raise DomainError(f"lambda={lam!r} must lie in [0, m={prob.m:g}]")
    return _shaped(_h_bu(arr, prob, 0.0, lam), t)


def _h_bu_alternative(
    t: FloatArray, prob: Problem, l: float, radius: float
) -> FloatArray:
    """((1+t)/t)(1 - F(c, p/2, zeta) / F(c+1, p/2, zeta)) for t > 0."""
    c = (prob.k + prob.p - l) / 2
    zeta = radius**2 * _t_fraction(t) / 2
    ratio = kummer_ratio(c, prob.p / 2, c + 1, prob.p / 2, zeta)
    with np.errstate(invalid="ignore"):
        factor = np.where(np.isinf(t), 1.0, (1.0 + t) / t)
    return np.asarray(factor * (1.0 - ratio), dtype=np.float64)


# --- Spherically symmetric mixtures ---


def _h_radial_mixture(
    t: FloatArray, prob: Problem, l: float, prior: RadialPrior, n_nodes: int
) -> FloatArray:
    r, weights = radial_nodes(prior, prob, n_nodes)
    c = (prob.k + prob.p - l) / 2
    with np.errstate(divide="ignore"):
        log_base = np.log(weights) - r**2 / 2
        log_h_scale = np.log(r**2 / prob.p)

    flat = np.atleast_1d(t).ravel()
    out = np.empty(flat.shape)
    for start in range(0, flat.size, _MIXTURE_BLOCK):
        frac = _t_fraction(flat[start : start + _MIXTURE_BLOCK])
        zeta = np.outer(frac, r**2 / 2)
        log_f_num, log_f_den = paired_log_kummer(
            c + 1, prob.p / 2 + 1, c + 1, prob.p / 2, zeta
        )
        numerator = logsumexp(log_base + log_h_scale + log_f_num, axis=1)
        denominator = logsumexp(log_base + log_f_den, axis=1)
        out[start : start + _MIXTURE_BLOCK] = np.exp(numerator - denominator)
    return out.reshape(np.shape(t))


@overload
def h_radial_mixture(
    t: float, prob: Problem, l: float, prior: RadialPrior, *, n_nodes: int | None = ...
) -> float: ...
@overload
def h_radial_mixture(
    t: FloatArray, prob: Problem, l: float, prior: RadialPrior, *, n_nodes: int | None = ...
) -> FloatArray: ...
def h_radial_mixture(
    t: float | FloatArray,
    prob: Problem,
    l: float,
    prior: RadialPrior,
    *,
    n_nodes: int | None = None,
) -> float | FloatArray:
    """Bayes multiplier for theta | sigma = R U with R ~ ``prior`` on [0, m].

    Posterior mean of h(R, l, t), R weighted by
    pi(r) exp(-r^2/2) F(c+1, p/2, r^2 t / (2(1+t))).
    """
    _check_l(l, prob)
    validate_prior(prior, prob)
    nodes = settings.quadrature_nodes if n_nodes is None else n_nodes
    return _shaped(_h_radial_mixture(_t_array(t), prob, l, prior, nodes), t)


# --- Dispatch ---


def multiplier_values(spec: EstimatorSpec, t: FloatArray, prob: Problem) -> FloatArray:
    """Vectorized h(t) of an already validated spec."""
    match spec:
        case Unbiased():
            return np.ones_like(t)
        case Affine(a=a):
            return np.full_like(t, a)
        case Mle():
            return _h_mle(t, prob)
        case BoundaryUniform(l=l, radius=radius):
            return _h_bu(t, prob, l, prob.m if radius is None else radius)
        case RadialMixture(l=l, prior=prior):
            return _h_radial_mixture(t, prob, l, prior, settings.quadrature_nodes)
        case Truncated(base=base):
            return np.minimum(multiplier_values(base, t, prob), _h_bu(t, prob, 0.0, prob.m))
        case Projected(base=base, weight=weight):
            h1 = multiplier_values(base, t, prob)
            excess = np.maximum(h1 - _h_bu(t, prob, 0.0, prob.m), 0.0)
            return h1 - weight * excess
        case TabulatedMultiplier(t=grid, h=values):
            return np.interp(t, grid, values)
    raise ConfigurationError(f"unknown estimator spec {spec!r}")


@overload
def multiplier(spec: EstimatorSpec, t: float, prob: Problem) -> float: ...
@overload
def multiplier(spec: EstimatorSpec, t: FloatArray, prob: Problem) -> FloatArray: ...
def multiplier(spec: EstimatorSpec, t: float | FloatArray, prob: Problem) -> float | FloatArray:
    """h(t) of any estimator spec; the spec is validated against ``prob`` first."""
    validate_spec(spec, prob)
    return _shaped(multiplier_values(spec, _t_array(t), prob), t)


def validate_spec(spec: EstimatorSpec, prob: Problem) -> None:
    """Raise ConfigurationError for constraints that depend on the problem."""
    match spec:
        case BoundaryUniform(l=l, radius=radius):
            _check_l(l, prob)
            if radius is not None and radius > prob.m * (1 + _RADIUS_SLACK):
                raise ConfigurationError(f"radius={radius:g} must lie in (0, m={prob.m:g}]")
        case RadialMixture(l=l, prior=prior):
            _check_l(l, prob)
            validate_prior(prior, prob)
        case Truncated(base=base) | Projected(base=base):
            validate_spec(base, prob)
        case _:
            pass


def _num(value: float) -> str:
    return f"{value:g}"


def describe(spec: EstimatorSpec) -> str:
    """Short label for CSV headers, legends and file names."""
    match spec:
        case Unbiased():
            return "ub"
        case Affine(a=a):
            return f"affine_a{_num(a)}"
        case Mle():
            return "mle"
        case BoundaryUniform(l=l, radius=radius):
            label = f"bu_l{_num(l)}"
            return label if radius is None else f"{label}_r{_num(radius)}"
        case RadialMixture(l=l, prior=prior):
            return f"mix_{_describe_prior(prior)}_l{_num(l)}"
        case Truncated(base=base):
            return f"trunc_{describe(base)}"
        case Projected(base=base, weight=weight):
            return f"proj{_num(weight)}_{describe(base)}"
        case TabulatedMultiplier(t=grid):
            return f"tab{len(grid)}"
    raise ConfigurationError(f"unknown estimator spec {spec!r}")


def _describe_prior(prior: RadialPrior) -> str:
    match prior:
        case PointMass(r=r):
            return f"point{_num(r)}"
        case BallUniform():
            return "ball"
        case TabulatedPrior(grid=grid):
            return f"tab{len(grid)}"
    raise ConfigurationError(f"unknown prior {prior!r}")
