"""Pydantic models for data flowing through estimation, risk and verification."""

from __future__ import annotations

import math
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, Literal

from pydantic import (
    AliasChoices,
    BaseModel,
    ConfigDict,
    Field,
    TypeAdapter,
    field_validator,
    model_validator,
)

DEFAULT_SEED = 20120601
DEFAULT_REPLICATES = 200_000
DEFAULT_CHUNK_SIZE = 50_000
DEFAULT_LAMBDA_POINTS = 21

_VALUE = ConfigDict(frozen=True, extra="forbid")


# === Enums ===


class EstimatorKind(StrEnum):
    UNBIASED = "unbiased"
    AFFINE = "affine"
    MLE = "mle"
    BOUNDARY_UNIFORM = "boundary_uniform"
    RADIAL_MIXTURE = "radial_mixture"
    TRUNCATED = "truncated"
    PROJECTED = "projected"
    TABULATED = "tabulated"


class PriorKind(StrEnum):
    POINT_MASS = "point_mass"
    BALL_UNIFORM = "ball_uniform"
    TABULATED = "tabulated"


class Suite(StrEnum):
    SPECFUN = "specfun"
    H_PROPERTIES = "h-properties"
    R1_INEQUALITY = "r1-inequality"
    DECOMPOSITION = "decomposition"
    DOMINANCE = "dominance"
    RADIAL_MIXTURE = "radial-mixture"
    UNIVERSAL = "universal"


class OutputFormat(StrEnum):
    CSV = "csv"
    SVG = "svg"


def _check_finite(values: tuple[float, ...], name: str) -> None:
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"{name} must be finite")


def _check_increasing(values: tuple[float, ...], name: str) -> None:
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise ValueError(f"{name} must be strictly increasing")


# === Problem ===


class Problem(BaseModel):
    """Dimension p, degrees of freedom k and signal-to-noise bound m."""

    model_config = _VALUE

    p: int = Field(ge=1)
    k: int = Field(ge=1)
    m: float = Field(gt=0, allow_inf_nan=False)

    @property
    def gamma(self) -> float:
        return (self.p + self.k) / self.m**2

    @property
    def mle_threshold(self) -> float:
        """Largest t at which the MLE still returns x unchanged."""
        return self.m**2 / (self.p + self.k)

    @property
    def posterior_bound(self) -> int:
        """Priors need l strictly below this for the posterior to exist."""
        return self.p + self.k

    def label(self) -> str:
        return f"p={self.p},k={self.k},m={self.m:g}"


# === Radial priors ===


class PointMass(BaseModel):
    """All prior mass on the sphere of radius r (in units of sigma)."""

    model_config = _VALUE

    kind: Literal["point_mass"] = "point_mass"
    r: float = Field(gt=0, allow_inf_nan=False)


class BallUniform(BaseModel):
    """theta | sigma uniform on the ball of radius m*sigma: R has density p r^(p-1) / m^p."""

    model_config = _VALUE

    kind: Literal["ball_uniform"] = "ball_uniform"


class TabulatedPrior(BaseModel):
    """Radial density given by values on a grid, linear in between."""

    model_config = _VALUE

    kind: Literal["tabulated"] = "tabulated"
    grid: tuple[float, ...] = Field(min_length=2)
    density: tuple[float, ...] = Field(min_length=2)

    @model_validator(mode="after")
    def _check_table(self) -> TabulatedPrior:
        if len(self.grid) != len(self.density):
            raise ValueError("grid and density must have the same length")
        _check_finite(self.grid, "grid")
        _check_finite(self.density, "density")
        _check_increasing(self.grid, "grid")
        if self.grid[0] < 0:
            raise ValueError("grid must start at r >= 0")
        if min(self.density) < 0:
            raise ValueError("density values must be nonnegative")
        return self


RadialPrior = Annotated[PointMass | BallUniform | TabulatedPrior, Field(discriminator="kind")]


# === Estimator specs ===


class Unbiased(BaseModel):
    model_config = _VALUE

    kind: Literal["unbiased"] = "unbiased"


class Affine(BaseModel):
    model_config = _VALUE

    kind: Literal["affine"] = "affine"
    a: float = Field(allow_inf_nan=False)


class Mle(BaseModel):
    model_config = _VALUE

    kind: Literal["mle"] = "mle"


class BoundaryUniform(BaseModel):
    """Bayes rule for theta | sigma uniform on the sphere of radius ``radius``*sigma.

    ``radius=None`` means the boundary radius m of the problem.
    """

    model_config = _VALUE

    kind: Literal["boundary_uniform"] = "boundary_uniform"
    l: float = Field(default=0.0, allow_inf_nan=False)
    radius: float | None = Field(default=None, gt=0, allow_inf_nan=False)


class RadialMixture(BaseModel):
    """Bayes rule for a spherically symmetric prior with radial law ``prior``."""

    model_config = _VALUE

    kind: Literal["radial_mixture"] = "radial_mixture"
    l: float = Field(default=0.0, allow_inf_nan=False)
    prior: RadialPrior


class Truncated(BaseModel):
    """Base multiplier capped at the envelope h(m, 0, t)."""

    model_config = _VALUE

    kind: Literal["truncated"] = "truncated"
    base: EstimatorSpec


class Projected(BaseModel):
    """Base multiplier pulled towards the envelope where it exceeds it.

    weight=1 is the truncation, weight=2 reflects the base about the envelope.
    """

    model_config = _VALUE

    kind: Literal["projected"] = "projected"
    base: EstimatorSpec
    weight: float = Field(default=1.0, ge=0.0, le=2.0)


class TabulatedMultiplier(BaseModel):
    """Multiplier given on a t grid, linear in between, constant outside."""

    model_config = _VALUE

    kind: Literal["tabulated"] = "tabulated"
    t: tuple[float, ...] = Field(min_length=1)
    h: tuple[float, ...] = Field(min_length=1)
    interpolation: Literal["linear"] = "linear"

    @model_validator(mode="after")
    def _check_table(self) -> TabulatedMultiplier:
        if len(self.t) != len(self.h):
            raise ValueError("t and h must have the same length")
        _check_finite(self.t, "t")
        _check_finite(self.h, "h")
        _check_increasing(self.t, "t")
        if self.t[0] < 0:
            raise ValueError("t grid must be nonnegative")
        if min(self.h) < 0:
            raise ValueError("tabulated multiplier values must be nonnegative")
        return self


EstimatorSpec = Annotated[
    Unbiased
    | Affine
    | Mle
    | BoundaryUniform
    | RadialMixture
    | Truncated
    | Projected
    | TabulatedMultiplier,
    Field(discriminator="kind"),
]

Truncated.model_rebuild()
Projected.model_rebuild()

SPEC_ADAPTER: TypeAdapter[EstimatorSpec] = TypeAdapter(EstimatorSpec)
PRIOR_ADAPTER: TypeAdapter[RadialPrior] = TypeAdapter(RadialPrior)


def parse_spec(data: str | dict[str, Any]) -> EstimatorSpec:
    """Parse an estimator spec from its JSON text or a decoded dict."""
    if isinstance(data, str):
        return SPEC_ADAPTER.validate_json(data)
    return SPEC_ADAPTER.validate_python(data)


def spec_to_json(spec: EstimatorSpec) -> str:
    return SPEC_ADAPTER.dump_json(spec).decode()


# === Monte Carlo ===


class SampleConfig(BaseModel):
    """Replicate count, seed and chunking of a Monte Carlo risk evaluation."""

    model_config = _VALUE

    replicates: int = Field(default=DEFAULT_REPLICATES, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _clamp_chunk_size(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        replicates = data.get("replicates", DEFAULT_REPLICATES)
        chunk_size = data.get("chunk_size", DEFAULT_CHUNK_SIZE)
        if (
            isinstance(replicates, int)
            and isinstance(chunk_size, int)
            and 1 <= replicates < chunk_size
        ):
            return {**data, "chunk_size": replicates}
        return data

    @property
    def n_chunks(self) -> int:
        return -(-self.replicates // self.chunk_size)

    def chunk_sizes(self) -> list[int]:
        sizes = [self.chunk_size] * (self.replicates // self.chunk_size)
        if self.replicates % self.chunk_size:
            sizes.append(self.replicates % self.chunk_size)
        return sizes


class RiskPoint(BaseModel):
    """Monte Carlo estimate of R(lambda, delta) with its standard error."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    lam: float = Field(alias="lambda", ge=0, allow_inf_nan=False)
    estimate: float = Field(ge=0)
    std_error: float = Field(ge=0)
    replicates: int = Field(ge=1)


class RiskCurve(BaseModel):
    """Risk points of one estimator over a lambda grid."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: Problem
    spec: EstimatorSpec
    points: tuple[RiskPoint, ...]

    @model_validator(mode="after")
    def _check_grid(self) -> RiskCurve:
        lams = tuple(pt.lam for pt in self.points)
        _check_increasing(lams, "lambda grid")
        if lams and lams[-1] > self.problem.m * (1 + 1e-12):
            raise ValueError(f"lambda grid exceeds m={self.problem.m}")
        return self

    @property
    def lambdas(self) -> list[float]:
        return [pt.lam for pt in self.points]

    @property
    def estimates(self) -> list[float]:
        return [pt.estimate for pt in self.points]


# === Verification ===


class Violation(BaseModel):
    """One grid point where a checked relation lhs <= rhs (or its variant) failed."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="strings")

    inputs: dict[str, float]
    lhs: float
    rhs: float
    relation: str = ""


class VerificationReport(BaseModel):
    """Outcome of a grid check. ``passed`` holds exactly when no violation was found.

    Reports with ``asserted=False`` are exploratory: their violations are
    recorded but do not fail a suite.
    """

    model_config = ConfigDict(
        frozen=True,
        populate_by_name=True,
        ser_json_inf_nan="strings",
    )

    name: str
    grid_description: str = Field(
        validation_alias=AliasChoices("grid", "grid_description"),
        serialization_alias="grid",
    )
    passed: bool
    violations: tuple[Violation, ...] = ()
    asserted: bool = True
    checks: int = Field(default=0, ge=0)
    notes: str = ""

    @model_validator(mode="after")
    def _passed_iff_clean(self) -> VerificationReport:
        if self.passed != (not self.violations):
            raise ValueError("passed must be true exactly when there are no violations")
        return self

    @classmethod
    def from_violations(
        cls,
        name: str,
        grid: str,
        violations: list[Violation],
        *,
        checks: int,
        asserted: bool = True,
        notes: str = "",
    ) -> VerificationReport:
        return cls(
            name=name,
            grid_description=grid,
            passed=not violations,
            violations=tuple(violations),
            asserted=asserted,
            checks=checks,
            notes=notes,
        )

    @property
    def blocking(self) -> bool:
        """True when this report fails a suite."""
        return self.asserted and not self.passed


# === CLI ===


class GridSpec(BaseModel):
    """``lo:hi:n[:log]`` grid description."""

    model_config = _VALUE

    lo: float = Field(allow_inf_nan=False)
    hi: float = Field(allow_inf_nan=False)
    n: int = Field(ge=1)
    log: bool = False

    @model_validator(mode="after")
    def _check_bounds(self) -> GridSpec:
        if self.hi < self.lo:
            raise ValueError("grid upper bound must be >= lower bound")
        if self.n == 1 and self.hi != self.lo:
            raise ValueError("a single-point grid needs lo == hi")
        if self.log and self.lo <= 0:
            raise ValueError("log grids need lo > 0")
        return self


class RunConfig(BaseModel):
    """Everything a CLI command needs, validated before any computation."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: Problem
    specs: tuple[EstimatorSpec, ...] = Field(min_length=1)
    lambda_grid: GridSpec | None = None
    t_grid: GridSpec | None = None
    sample: SampleConfig = Field(default_factory=SampleConfig)
    output_dir: Path = Path("output")
    formats: frozenset[OutputFormat] = frozenset({OutputFormat.CSV})
    workers: int = Field(default=1, ge=1)

    @field_validator("lambda_grid")
    @classmethod
    def _nonnegative_lambdas(cls, grid: GridSpec | None) -> GridSpec | None:
        if grid is not None and grid.lo < 0:
            raise ValueError("lambda grid must be nonnegative")
        return grid

    @model_validator(mode="after")
    def _check_against_problem(self) -> RunConfig:
        from snrbound.estimators import validate_spec

        for spec in self.specs:
            validate_spec(spec, self.problem)
        if self.lambda_grid is not None and self.lambda_grid.hi > self.problem.m:
            raise ValueError(
                f"lambda grid upper bound {self.lambda_grid.hi:g} exceeds m={self.problem.m:g}"
            )
        return self
