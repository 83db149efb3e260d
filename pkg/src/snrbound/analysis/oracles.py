"""Independent reference computations used to cross-check the kernel.

Nothing here is used by the estimators themselves: the Bayes ratio oracle
integrates the posterior directly with scipy's adaptive quadrature, and the
series oracles sum in arbitrary precision with mpmath.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gammaln, ive

from snrbound.errors import ConfigurationError
from snrbound.models import BallUniform, PointMass, Problem, RadialPrior, TabulatedPrior

logger = logging.getLogger(__name__)

MIN_ORACLE_TERMS = 200
ORACLE_DPS = 50


def log_hyp0f1(b: float, x: float) -> float:
    """log 0F1(; b; x) for x >= 0 through the exponentially scaled Bessel function."""
    if x == 0:
        return 0.0
    w = 2 * math.sqrt(x)
    return float(gammaln(b) + (1 - b) * math.log(w / 2) + math.log(ive(b - 1, w)) + w)


def _prior_density(
    prior: RadialPrior, prob: Problem
) -> tuple[float, float, Callable[[float], float]]:
    match prior:
        case BallUniform():
            return 0.0, prob.m, lambda r: float(prob.p * r ** (prob.p - 1) / prob.m**prob.p)
        case TabulatedPrior(grid=grid, density=density):
            return grid[0], grid[-1], lambda r: float(np.interp(r, grid, density))
    raise ConfigurationError(f"no density for prior {prior!r}")


def bayes_ratio_quadrature(t: float, prob: Problem, l: float, prior: RadialPrior) -> float:
    """Bayes multiplier at t by brute-force quadrature over (r, precision).

    With s^2 = 1 and |x|^2 = t, the Bayes rule is the posterior mean of
    theta/sigma^2 over the posterior mean of 1/sigma^2. After integrating the
    direction of theta over the sphere and substituting v = (1+t)/(2 sigma^2)
    the multiplier is a ratio of two double integrals of

        v^c exp(-v - r^2/2) 0F1(; b; v zeta_r) pi(r),   zeta_r = r^2 t / (2(1+t)),

    with b = p/2 + 1 and an extra factor r^2/p in the numerator, b = p/2 in
    the denominator, and c = (p+k-l)/2.
    """
    c = (prob.p + prob.k - l) / 2
    frac = t / (1 + t)
    log_norm = float(gammaln(c + 1))

    def log_kernel(v: float, r: float, b: float) -> float:
        zeta = r * r * frac / 2
        return c * math.log(v) - v - r * r / 2 + log_hyp0f1(b, v * zeta) - log_norm

    def numerator(v: float, r: float) -> float:
        if v <= 0:
            return 0.0
        return r * r / prob.p * math.exp(log_kernel(v, r, prob.p / 2 + 1))

    def denominator(v: float, r: float) -> float:
        if v <= 0:
            return 0.0
        return math.exp(log_kernel(v, r, prob.p / 2))

    opts = {"epsabs": 1e-14, "epsrel": 1e-11}
    if isinstance(prior, PointMass):
        r = prior.r
        num, _ = integrate.quad(lambda v: numerator(v, r), 0.0, math.inf, limit=200, **opts)
        den, _ = integrate.quad(lambda v: denominator(v, r), 0.0, math.inf, limit=200, **opts)
        return float(num / den)

    lo, hi, density = _prior_density(prior, prob)

    def weighted(fn: Callable[[float, float], float]) -> Callable[[float, float], float]:
        return lambda v, r: fn(v, r) * density(r)

    num, num_err = integrate.dblquad(weighted(numerator), lo, hi, 0.0, math.inf, **opts)
    den, den_err = integrate.dblquad(weighted(denominator), lo, hi, 0.0, math.inf, **opts)
    logger.debug(
        "bayes ratio oracle t=%g: num %.12g (err %.1g), den %.12g (err %.1g)",
        t,
        num,
        num_err,
        den,
        den_err,
    )
    return float(num / den)


# --- Arbitrary-precision series ---


def mp_kummer(a: float, b: float, z: float, dps: int = ORACLE_DPS) -> mpmath.mpf:
    """F(a, b, z) summed term by term in ``dps``-digit arithmetic (at least 200 terms)."""
    with mpmath.workdps(dps):
        a_, b_, z_ = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-dps)
        i = 0
        while i < MIN_ORACLE_TERMS or abs(term) > eps * abs(total):
            term *= (a_ + i) / (b_ + i) * z_ / (i + 1)
            total += term
            i += 1
        return +total


def mp_bessel_i(nu: float, z: float, dps: int = ORACLE_DPS) -> mpmath.mpf:
    """I_nu(z) = sum_k (z/2)^(nu+2k) / (k! Gamma(nu+k+1)) in ``dps``-digit arithmetic."""
    with mpmath.workdps(dps):
        half = mpmath.mpf(z) / 2
        nu_ = mpmath.mpf(nu)
        term = half**nu_ / mpmath.gamma(nu_ + 1)
        total = term
        eps = mpmath.mpf(10) ** (-dps)
        k = 0
        while k < MIN_ORACLE_TERMS or abs(term) > eps * abs(total):
            term *= half**2 / ((k + 1) * (nu_ + k + 1))
            total += term
            k += 1
        return +total


def mp_r_ratio(p: int, k: int, z: float) -> float:
    a = (k + p) / 2 + 1
    return float(mp_kummer(a, p / 2, z) / mp_kummer(a, p / 2 + 1, z))


def mp_r_lower_bound(p: int, k: int, z: float) -> float:
    with mpmath.workdps(ORACLE_DPS):
        z_ = mpmath.mpf(z)
        return float(z_ / p * (mpmath.sqrt(1 + 2 * (k + p) / z_) + 1))


def mp_h_bu(t: float, prob: Problem, l: float = 0.0, radius: float | None = None) -> float:
    """h(radius, l, t) from the arbitrary-precision series."""
    radius = prob.m if radius is None else radius
    c = (prob.k + prob.p - l) / 2
    zeta = radius**2 / 2 if math.isinf(t) else radius**2 * t / (2 * (1 + t))
    ratio = mp_kummer(c + 1, prob.p / 2 + 1, zeta) / mp_kummer(c + 1, prob.p / 2, zeta)
    return float(radius**2 / prob.p * ratio)
