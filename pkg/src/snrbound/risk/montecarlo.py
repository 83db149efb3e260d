"""Monte Carlo risk of equivariant estimators.

Replicates are split into chunks. Chunk i draws from its own generator
seeded by (seed, i), so a chunk's draws never depend on scheduling. Chunk
summaries are merged in index order, which makes every estimate independent
of the number of worker threads.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TypeVar

import numpy as np
import numpy.typing as npt

from snrbound import events
from snrbound.config import settings
from snrbound.errors import DomainError, EvaluationError, SnrboundError
from snrbound.estimators import describe, h_best_equivariant, multiplier_values, validate_spec
from snrbound.models import EstimatorSpec, Problem, RiskCurve, RiskPoint, SampleConfig
from snrbound.risk.sampling import check_lambda, chunk_stream, sample_batch, unit_direction
from snrbound.specfun import FloatArray

logger = logging.getLogger(__name__)

_T = TypeVar("_T")


@dataclass(frozen=True)
class Moments:
    """Count, mean and sum of squared deviations of a sample (Welford/Chan form)."""

    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, values: FloatArray) -> Moments:
        mean = float(np.mean(values))
        return cls(count=int(values.size), mean=mean, m2=float(np.sum((values - mean) ** 2)))

    def merge(self, other: Moments) -> Moments:
        if self.count == 0:
            return other
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta**2 * self.count * other.count / count
        return Moments(count=count, mean=mean, m2=m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else 0.0


_EMPTY = Moments(count=0, mean=0.0, m2=0.0)


@dataclass(frozen=True)
class RiskDifference:
    """Paired estimate of R(lambda, A) - R(lambda, B) on common draws."""

    estimate: float
    std_error: float

    def within(self, multiplier: float) -> bool:
        """True when the difference is >= -multiplier * SE."""
        return self.estimate >= -multiplier * self.std_error


@dataclass(frozen=True)
class DecompositionCheck:
    """Direct MC risk against its conditional-decomposition form on the same draws."""

    lhs: float
    rhs: float
    tolerance: float
    std_error: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.tolerance


def _run_chunks(
    cfg: SampleConfig,
    lam: float,
    work: Callable[[int, int], _T],
    workers: int | None,
) -> list[_T]:
    """Run ``work(chunk_index, chunk_size)`` over all chunks; results in chunk order."""
    sizes = cfg.chunk_sizes()

    def guarded(index: int) -> _T:
        try:
            return work(index, sizes[index])
        except SnrboundError as exc:
            raise EvaluationError(
                f"Monte Carlo chunk failed: {exc}", chunk=index, lam=lam
            ) from exc

    n_workers = min(workers or settings.max_workers, len(sizes))
    if n_workers <= 1:
        return [guarded(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=n_workers, thread_name_prefix="mc") as pool:
        return list(pool.map(guarded, range(len(sizes))))


def _losses(
    specs: Sequence[EstimatorSpec],
    x: FloatArray,
    s2: FloatArray,
    theta: FloatArray,
    prob: Problem,
) -> list[FloatArray]:
    xx = np.einsum("ij,ij->i", x, x)
    t = xx / s2
    x_theta = x @ theta
    theta_sq = float(theta @ theta)
    out = []
    for spec in specs:
        h = multiplier_values(spec, t, prob)
        out.append(h * h * xx - 2.0 * h * x_theta + theta_sq)
    return out


def _merge(parts: Sequence[Moments]) -> Moments:
    total = _EMPTY
    for part in parts:
        total = total.merge(part)
    return total


def mc_risk(
    spec: EstimatorSpec,
    lam: float,
    prob: Problem,
    cfg: SampleConfig,
    *,
    direction: npt.ArrayLike | None = None,
    workers: int | None = None,
) -> RiskPoint:
    """Sample mean of |h(t) x - theta|^2 with its standard error.

    theta = lambda * direction (e_1 by default) and sigma = 1.
    """
    validate_spec(spec, prob)
    check_lambda(lam, prob)
    theta = lam * unit_direction(direction, prob.p)

    def work(index: int, size: int) -> Moments:
        x, s2 = sample_batch(lam, prob, chunk_stream(cfg.seed, index), size, direction)
        return Moments.of(_losses([spec], x, s2, theta, prob)[0])

    total = _merge(_run_chunks(cfg, lam, work, workers))
    logger.debug(
        "risk %s at lambda=%.4g: %.6g (se %.2g)", describe(spec), lam, total.mean, total.std_error
    )
    return RiskPoint(
        lam=lam, estimate=total.mean, std_error=total.std_error, replicates=total.count
    )


def mc_risk_many(
    specs: Sequence[EstimatorSpec],
    lam: float,
    prob: Problem,
    cfg: SampleConfig,
    *,
    workers: int | None = None,
) -> list[RiskPoint]:
    """Risk of several specs at one lambda, all evaluated on the same draws.

    Each point equals what :func:`mc_risk` returns for that spec alone.
    """
    for spec in specs:
        validate_spec(spec, prob)
    check_lambda(lam, prob)
    theta = lam * unit_direction(None, prob.p)

    def work(index: int, size: int) -> list[Moments]:
        x, s2 = sample_batch(lam, prob, chunk_stream(cfg.seed, index), size)
        return [Moments.of(loss) for loss in _losses(specs, x, s2, theta, prob)]

    parts = _run_chunks(cfg, lam, work, workers)
    points = []
    for j in range(len(specs)):
        total = _merge([part[j] for part in parts])
        points.append(
            RiskPoint(
                lam=lam, estimate=total.mean, std_error=total.std_error, replicates=total.count
            )
        )
    return points


def mc_risk_difference(
    spec_a: EstimatorSpec,
    spec_b: EstimatorSpec,
    lam: float,
    prob: Problem,
    cfg: SampleConfig,
    *,
    workers: int | None = None,
) -> RiskDifference:
    """R(lambda, A) - R(lambda, B) from paired losses on the same (x, s2) draws."""
    validate_spec(spec_a, prob)
    validate_spec(spec_b, prob)
    check_lambda(lam, prob)
    theta = lam * unit_direction(None, prob.p)

    def work(index: int, size: int) -> Moments:
        x, s2 = sample_batch(lam, prob, chunk_stream(cfg.seed, index), size)
        loss_a, loss_b = _losses([spec_a, spec_b], x, s2, theta, prob)
        return Moments.of(loss_a - loss_b)

    total = _merge(_run_chunks(cfg, lam, work, workers))
    return RiskDifference(estimate=total.mean, std_error=total.std_error)


def conditional_decomposition_check(
    spec: EstimatorSpec,
    lam: float,
    prob: Problem,
    cfg: SampleConfig,
    *,
    workers: int | None = None,
) -> DecompositionCheck:
    """Compare the direct risk with lambda^2 + E[x'x ((h - g)^2 - g^2)], g = h(lambda, 0, t).

    Both sides are averaged over the same draws; the tolerance is
    ``settings.se_multiplier`` paired standard errors, floored at 1e-12
    relative for the cases where both sides coincide draw by draw.
    """
    validate_spec(spec, prob)
    check_lambda(lam, prob)
    theta = lam * unit_direction(None, prob.p)

    def work(index: int, size: int) -> tuple[Moments, Moments, Moments]:
        x, s2 = sample_batch(lam, prob, chunk_stream(cfg.seed, index), size)
        xx = np.einsum("ij,ij->i", x, x)
        t = xx / s2
        h = multiplier_values(spec, t, prob)
        g = h_best_equivariant(t, prob, lam)
        direct = h * h * xx - 2.0 * h * (x @ theta) + lam**2
        decomposed = lam**2 + xx * ((h - g) ** 2 - g**2)
        return Moments.of(direct), Moments.of(decomposed), Moments.of(direct - decomposed)

    parts = _run_chunks(cfg, lam, work, workers)
    lhs = _merge([p[0] for p in parts])
    rhs = _merge([p[1] for p in parts])
    paired = _merge([p[2] for p in parts])
    tolerance = max(
        settings.se_multiplier * paired.std_error, 1e-12 * max(abs(lhs.mean), 1.0)
    )
    return DecompositionCheck(
        lhs=lhs.mean, rhs=rhs.mean, tolerance=tolerance, std_error=paired.std_error
    )


def risk_curve(
    spec: EstimatorSpec,
    prob: Problem,
    lambda_grid: Sequence[float] | FloatArray,
    cfg: SampleConfig,
    *,
    workers: int | None = None,
) -> RiskCurve:
    """One RiskPoint per lambda. Every point reuses ``cfg.seed`` so curves of
    different specs are evaluated on common draws.
    """
    points = [
        mc_risk(spec, float(lam), prob, cfg, workers=workers) for lam in lambda_grid
    ]
    curve = RiskCurve(problem=prob, spec=spec, points=tuple(points))
    events.emit(
        "risk",
        "info",
        "risk_curve_done",
        f"{describe(spec)} on {len(points)} lambda points ({prob.label()})",
        context={"spec": describe(spec), "replicates": cfg.replicates, "seed": cfg.seed},
    )
    return curve


def risk_curves(
    specs: Sequence[EstimatorSpec],
    prob: Problem,
    lambda_grid: Sequence[float] | FloatArray,
    cfg: SampleConfig,
    *,
    workers: int | None = None,
) -> list[RiskCurve]:
    """Curves of several specs, drawing each lambda's sample once for all of them."""
    columns = [mc_risk_many(specs, float(lam), prob, cfg, workers=workers) for lam in lambda_grid]
    curves = [
        RiskCurve(problem=prob, spec=spec, points=tuple(row[j] for row in columns))
        for j, spec in enumerate(specs)
    ]
    events.emit(
        "risk",
        "info",
        "risk_curves_done",
        f"{len(specs)} specs on {len(columns)} lambda points ({prob.label()})",
        context={
            "specs": [describe(s) for s in specs],
            "replicates": cfg.replicates,
            "seed": cfg.seed,
        },
    )
    return curves


def relative_gain(base: RiskCurve, improved: RiskCurve) -> list[tuple[float, float]]:
    """(lambda, (R_base - R_improved) / R_base) at every shared grid point."""
    if base.lambdas != improved.lambdas:
        raise DomainError("curves must share the same lambda grid")
    gains = []
    for b, i in zip(base.points, improved.points, strict=True):
        gain = (b.estimate - i.estimate) / b.estimate if b.estimate > 0 else 0.0
        gains.append((b.lam, gain))
    return gains
