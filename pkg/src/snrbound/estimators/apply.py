"""Applying equivariant estimators to data, and the two-sample reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from snrbound.errors import DomainError
from snrbound.estimators.multipliers import multiplier
from snrbound.models import EstimatorSpec, Problem
from snrbound.specfun import FloatArray


def statistic(x: FloatArray, s2: float) -> float:
    """Maximal invariant t = |x|^2 / s^2."""
    return float(np.dot(x, x)) / s2


def estimate(
    spec: EstimatorSpec, x: npt.ArrayLike, s2: float, prob: Problem
) -> FloatArray:
    """delta_h(x, s^2) = h(|x|^2/s^2) x."""
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (prob.p,):
        raise DomainError(f"x must have length p={prob.p}, got shape {vec.shape}")
    if not np.isfinite(vec).all():
        raise DomainError("x must be finite")
    if not s2 > 0 or not math.isfinite(s2):
        raise DomainError(f"s2 must be a finite positive number, got {s2!r}")
    return multiplier(spec, statistic(vec, s2), prob) * vec


@dataclass(frozen=True)
class TwoSampleReduction:
    """Canonical data for estimating theta_1 when |theta_1 - theta_2| <= m' sigma'."""

    x: FloatArray
    w: FloatArray
    s2: float
    m: float

    def recombine(self, psi: npt.ArrayLike) -> FloatArray:
        """theta_1 estimate w + psi from an estimate psi of (theta_1 - theta_2)/2."""
        return self.w + np.asarray(psi, dtype=np.float64)


def two_sample_map(
    x1: npt.ArrayLike, x2: npt.ArrayLike, s2_prime: float, m_prime: float
) -> TwoSampleReduction:
    """Rotate (X1, X2) to X = (X1 - X2)/2 and W = (X1 + X2)/2.

    X then has variance sigma'^2/2, so s^2 = s'^2/2 and the bound becomes
    m = m'/sqrt(2).
    """
    a = np.asarray(x1, dtype=np.float64)
    b = np.asarray(x2, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"x1 and x2 must be vectors of equal length, got {a.shape} and {b.shape}")
    if not s2_prime > 0:
        raise DomainError(f"s2_prime must be > 0, got {s2_prime!r}")
    if not m_prime > 0:
        raise DomainError(f"m_prime must be > 0, got {m_prime!r}")
    return TwoSampleReduction(
        x=(a - b) / 2,
        w=(a + b) / 2,
        s2=s2_prime / 2,
        m=m_prime / math.sqrt(2),
    )
