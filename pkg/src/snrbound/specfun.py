"""Confluent hypergeometric and modified Bessel functions on the positive quadrant.

All evaluations are plain power series summed term by term. Ratios of two
Kummer series are summed simultaneously and rescaled by the running maximum,
so they stay finite while each series on its own grows like e^z.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import overload

import numpy as np
import numpy.typing as npt
from scipy import integrate
from scipy.special import gammaln

from snrbound.errors import DomainError, EvaluationError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

REL_TOL = 1e-15
MAX_TERMS = 20_000
# Both partial sums are divided down once either exceeds this.
_RESCALE_AT = 1e200
_LOG_MAX_FLOAT = math.log(np.finfo(np.float64).max)


@dataclass(frozen=True)
class SeriesResult:
    """A truncated power series sum."""

    value: float
    terms_used: int
    converged: bool
    log_value: float


def _as_array(value: float | FloatArray) -> FloatArray:
    return np.asarray(value, dtype=np.float64)


def _check_parameters(**params: float | FloatArray) -> None:
    for name, value in params.items():
        arr = _as_array(value)
        if not np.isfinite(arr).all():
            raise DomainError(f"{name} must be finite, got {value!r}")
        if name.startswith("z"):
            if (arr < 0).any():
                raise DomainError(f"{name} must be >= 0, got {value!r}")
        elif (arr <= 0).any():
            raise DomainError(f"{name} must be > 0, got {value!r}")


def _paired_series(
    a1: float | FloatArray,
    b1: float | FloatArray,
    a2: float | FloatArray,
    b2: float | FloatArray,
    z: float | FloatArray,
    *,
    rel_tol: float = REL_TOL,
    max_terms: int = MAX_TERMS,
) -> tuple[FloatArray, FloatArray, FloatArray, int, bool]:
    """Sum F(a1,b1,z) and F(a2,b2,z) together.

    Returns (num, den, log_scale, terms_used, converged) where the series
    values are num*exp(log_scale) and den*exp(log_scale).
    """
    A1, B1, A2, B2, Z = np.broadcast_arrays(*(_as_array(v) for v in (a1, b1, a2, b2, z)))
    shape = Z.shape
    t1 = np.ones(shape)
    t2 = np.ones(shape)
    s1 = np.ones(shape)
    s2 = np.ones(shape)
    log_scale = np.zeros(shape)
    active = Z > 0
    terms = 1
    for i in range(max_terms - 1):
        if not active.any():
            break
        r1 = (A1 + i) / (B1 + i) * Z / (i + 1)
        r2 = (A2 + i) / (B2 + i) * Z / (i + 1)
        t1 = np.where(active, t1 * r1, t1)
        t2 = np.where(active, t2 * r2, t2)
        s1 = np.where(active, s1 + t1, s1)
        s2 = np.where(active, s2 + t2, s2)
        terms = i + 2

        peak = np.maximum(s1, s2)
        big = active & (peak > _RESCALE_AT)
        if big.any():
            scale = np.where(big, peak, 1.0)
            t1, t2, s1, s2 = t1 / scale, t2 / scale, s1 / scale, s2 / scale
            log_scale = log_scale + np.log(scale)

        # only trust the tolerance test once terms are shrinking for good
        decaying = (r1 < 1) & (r2 < 1) & (i + 1 >= Z)
        small = (np.abs(t1) <= rel_tol * np.abs(s1)) & (np.abs(t2) <= rel_tol * np.abs(s2))
        active = active & ~(decaying & small)
    return s1, s2, log_scale, terms, not active.any()


def kummer_series(
    a: float,
    b: float,
    z: float,
    *,
    rel_tol: float = REL_TOL,
    max_terms: int = MAX_TERMS,
) -> SeriesResult:
    """Sum F(a, b, z) without raising on non-convergence.

    ``value`` is ``inf`` when the sum exceeds the float range; ``log_value``
    stays finite.
    """
    _check_parameters(a=a, b=b, z=z)
    s, _, log_scale, terms, converged = _paired_series(
        a, b, a, b, z, rel_tol=rel_tol, max_terms=max_terms
    )
    log_value = float(np.log(s) + log_scale)
    value = math.exp(log_value) if log_value < _LOG_MAX_FLOAT else math.inf
    return SeriesResult(value=value, terms_used=terms, converged=converged, log_value=log_value)


def kummer_m(a: float, b: float, z: float) -> float:
    """Kummer's function F(a, b, z) = sum_i (a)_i / (b)_i z^i / i! for a, b > 0, z >= 0."""
    result = kummer_series(a, b, z)
    if not result.converged:
        raise EvaluationError("Kummer series did not converge", a=a, b=b, z=z)
    if math.isinf(result.value):
        raise EvaluationError("Kummer series overflows float range", a=a, b=b, z=z)
    return result.value


def log_kummer_m(a: float, b: float, z: float) -> float:
    result = kummer_series(a, b, z)
    if not result.converged:
        raise EvaluationError("Kummer series did not converge", a=a, b=b, z=z)
    return result.log_value


def paired_log_kummer(
    a1: float | FloatArray,
    b1: float | FloatArray,
    a2: float | FloatArray,
    b2: float | FloatArray,
    z: float | FloatArray,
) -> tuple[FloatArray, FloatArray]:
    """log F(a1,b1,z) and log F(a2,b2,z), elementwise, from one paired summation."""
    _check_parameters(a1=a1, b1=b1, a2=a2, b2=b2, z=z)
    num, den, log_scale, _, converged = _paired_series(a1, b1, a2, b2, z)
    if not converged:
        raise EvaluationError("Kummer series did not converge", a1=a1, b1=b1, a2=a2, b2=b2)
    return np.log(num) + log_scale, np.log(den) + log_scale


@overload
def kummer_ratio(a1: float, b1: float, a2: float, b2: float, z: float) -> float: ...
@overload
def kummer_ratio(a1: float, b1: float, a2: float, b2: float, z: FloatArray) -> FloatArray: ...
def kummer_ratio(
    a1: float, b1: float, a2: float, b2: float, z: float | FloatArray
) -> float | FloatArray:
    """F(a1,b1,z) / F(a2,b2,z), finite for z up to the verification range (700)."""
    _check_parameters(a1=a1, b1=b1, a2=a2, b2=b2, z=z)
    num, den, _, terms, converged = _paired_series(a1, b1, a2, b2, z)
    if not converged:
        raise EvaluationError(
            "Kummer ratio did not converge", a1=a1, b1=b1, a2=a2, b2=b2, terms=terms
        )
    ratio = num / den
    if np.ndim(z) == 0:
        return float(ratio)
    return ratio


def _log_bessel_i(nu: float, z: float) -> float:
    if nu < -0.5:
        raise DomainError(f"nu must be >= -1/2, got {nu}")
    if z < 0 or math.isnan(z):
        raise DomainError(f"z must be >= 0, got {z}")
    if z == 0:
        if nu == 0:
            return 0.0
        return -math.inf if nu > 0 else math.inf

    log_first = nu * math.log(z / 2) - float(gammaln(nu + 1))
    q = (z / 2) ** 2
    term = 1.0
    total = 1.0
    log_scale = 0.0
    for k in range(MAX_TERMS):
        ratio = q / ((k + 1) * (nu + k + 1))
        term *= ratio
        total += term
        if total > _RESCALE_AT:
            term /= total
            log_scale += math.log(total)
            total = 1.0
        if ratio < 1 and term <= REL_TOL * total:
            return log_first + log_scale + math.log(total)
    raise EvaluationError("Bessel series did not converge", nu=nu, z=z)


def bessel_i(nu: float, z: float) -> float:
    """Modified Bessel function of the first kind I_nu(z) for nu >= -1/2, z >= 0."""
    log_value = _log_bessel_i(nu, z)
    if log_value >= _LOG_MAX_FLOAT:
        raise EvaluationError("Bessel series overflows float range", nu=nu, z=z)
    return math.exp(log_value)


def langevin_mgf(y_norm: float, r: float, p: int) -> float:
    """E[exp(y'U)] for U uniform on the sphere of radius r in R^p.

    Closed form Gamma(p/2) 2^(p/2-1) I_(p/2-1)(w) / w^(p/2-1) with w = |y| r.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if y_norm < 0 or r < 0:
        raise DomainError("y_norm and r must be >= 0")
    w = y_norm * r
    if w == 0:
        return 1.0
    nu = p / 2 - 1
    log_value = float(gammaln(p / 2)) + nu * math.log(2) + _log_bessel_i(nu, w) - nu * math.log(w)
    if log_value >= _LOG_MAX_FLOAT:
        raise EvaluationError("Langevin normalizer overflows float range", p=p, w=w)
    return math.exp(log_value)


# --- Scale-mixture identity ---


def scale_mixture_quad(alpha: float, nu: float, mu: float, T: float) -> float:
    """Integral over A > 0 of A^-alpha exp(-T/(2A)) I_nu(mu/sqrt(A)) by adaptive quadrature.

    Integrated in u = 1/A, where the integrand is u^(alpha-2) exp(-T u/2) I_nu(mu sqrt(u)).
    """

    def integrand(u: float) -> float:
        if u == 0:
            return 0.0
        log_f = (
            (alpha - 2) * math.log(u) - T * u / 2 + _log_bessel_i(nu, mu * math.sqrt(u))
        )
        return math.exp(log_f)

    value, abserr = integrate.quad(integrand, 0.0, math.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    logger.debug("scale mixture quadrature %.12g (abserr %.2g)", value, abserr)
    return float(value)


def scale_mixture_closed(alpha: float, nu: float, mu: float, T: float) -> float:
    """Closed form of :func:`scale_mixture_quad` in terms of Kummer's function."""
    s = alpha + nu / 2 - 1
    if s <= 0:
        raise DomainError(f"alpha + nu/2 - 1 must be > 0, got {s}")
    x = mu**2 / (2 * T)
    log_value = (
        float(gammaln(s))
        - float(gammaln(nu + 1))
        + (nu / 2) * math.log(x)
        + (alpha - 1) * math.log(2 / T)
        + log_kummer_m(s, nu + 1, x)
    )
    return math.exp(log_value)
