"""Closed-form risk of the affine estimators a*X."""

from __future__ import annotations

from snrbound.models import Problem


def affine_risk(a: float, lam: float, p: int) -> float:
    """R(lambda, aX) = a^2 p + (1 - a)^2 lambda^2."""
    return a * a * p + (1.0 - a) ** 2 * lam * lam


def affine_dominance_interval(prob: Problem) -> tuple[float, float]:
    """Half-open interval [lo, 1) of a for which aX dominates X on [0, m].

    The risk is largest at lambda = m, where a^2 p + (1-a)^2 m^2 <= p exactly
    when a >= (m^2 - p) / (m^2 + p).
    """
    m2 = prob.m**2
    return (m2 - prob.p) / (m2 + prob.p), 1.0


def minimax_affine(prob: Problem) -> tuple[float, float]:
    """(a*, max risk) for a* = m^2/(m^2+p), whose maximum risk is m^2 p/(m^2+p)."""
    m2 = prob.m**2
    a = m2 / (m2 + prob.p)
    return a, m2 * prob.p / (m2 + prob.p)
