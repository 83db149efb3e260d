"""Canonical draws at sigma = 1, theta = lambda * direction."""

from __future__ import annotations

import numpy as np
import numpy.typing as npt

from snrbound.errors import DomainError
from snrbound.models import Problem
from snrbound.specfun import FloatArray

_LAMBDA_SLACK = 1e-12


def chunk_stream(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent generator for one chunk, determined by (seed, chunk_index) alone."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_index,)))


def check_lambda(lam: float, prob: Problem) -> None:
    if not 0 <= lam <= prob.m * (1 + _LAMBDA_SLACK):
        raise DomainError(f"lambda={lam!r} must lie in [0, m={prob.m:g}]")


def unit_direction(direction: npt.ArrayLike | None, p: int) -> FloatArray:
    """Normalized direction of theta; e_1 when ``direction`` is None."""
    if direction is None:
        e1 = np.zeros(p)
        e1[0] = 1.0
        return e1
    v = np.asarray(direction, dtype=np.float64)
    if v.shape != (p,):
        raise DomainError(f"direction must have length p={p}, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if not norm > 0:
        raise DomainError("direction must be nonzero")
    return v / norm


def sample_batch(
    lam: float,
    prob: Problem,
    stream: np.random.Generator,
    n: int,
    direction: npt.ArrayLike | None = None,
) -> tuple[FloatArray, FloatArray]:
    """n independent draws: x ~ N_p(lambda v, I) and s2 ~ chi^2_k.

    Returns x with shape (n, p) and s2 with shape (n,).
    """
    check_lambda(lam, prob)
    theta = lam * unit_direction(direction, prob.p)
    x = stream.standard_normal((n, prob.p)) + theta
    s2 = np.square(stream.standard_normal((n, prob.k))).sum(axis=1)
    return x, s2


def sample_canonical(
    lam: float, prob: Problem, stream: np.random.Generator
) -> tuple[FloatArray, float]:
    """One draw (x, s2) of the canonical model at sigma = 1, theta = lambda e_1."""
    x, s2 = sample_batch(lam, prob, stream, 1)
    return x[0], float(s2[0])
