"""Figure reproductions driven by the YAML presets in ``config/figures``.

Each preset yields a multiplier table and chart plus one risk curve per
spec, all on common draws. ``summary.txt`` lists the relative gains of the
configured (base, improved) pairs at lambda = 0, at lambda = m and their
range over the grid.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from snrbound import events
from snrbound.cli.plots import multiplier_chart, risk_chart, write_chart
from snrbound.config import load_all_figure_configs, load_figure_config
from snrbound.errors import ConfigurationError
from snrbound.estimators import describe, multiplier
from snrbound.grids import default_t_grid, lambda_grid
from snrbound.models import (
    DEFAULT_LAMBDA_POINTS,
    EstimatorSpec,
    Problem,
    RiskCurve,
    SampleConfig,
)
from snrbound.risk import relative_gain, risk_curves, write_curve_csv, write_table_csv

logger = logging.getLogger(__name__)


class GainPair(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    base: str
    improved: str


class FigurePreset(BaseModel):
    """One figure: a problem, the specs to draw, and the gains to summarize."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    slug: str
    title: str
    problem: Problem
    specs: tuple[EstimatorSpec, ...] = Field(min_length=1)
    lambda_points: int = Field(default=DEFAULT_LAMBDA_POINTS, ge=2)
    gains: tuple[GainPair, ...] = ()
    notes: str = ""

    @model_validator(mode="after")
    def _gains_name_specs(self) -> FigurePreset:
        labels = {describe(spec) for spec in self.specs}
        for pair in self.gains:
            for label in (pair.base, pair.improved):
                if label not in labels:
                    raise ValueError(f"gain label {label!r} is not one of {sorted(labels)}")
        return self


@dataclass(frozen=True)
class GainSummary:
    base: str
    improved: str
    at_zero: float
    at_boundary: float
    low: float
    high: float


@dataclass(frozen=True)
class FigureResult:
    preset: FigurePreset
    curves: dict[str, RiskCurve]
    gains: list[GainSummary]
    files: list[Path]


def load_presets(slugs: Iterable[str] | None = None) -> list[FigurePreset]:
    """Validated presets, all of them (in slug order) when ``slugs`` is None."""
    if slugs is None:
        raw: list[dict[str, Any]] = list(load_all_figure_configs().values())
    else:
        raw = [load_figure_config(slug) for slug in slugs]
    if not raw:
        raise ConfigurationError("no figure presets found")
    return [FigurePreset.model_validate(data) for data in raw]


def _summarize(preset: FigurePreset, curves: dict[str, RiskCurve]) -> list[GainSummary]:
    out = []
    for pair in preset.gains:
        gains = relative_gain(curves[pair.base], curves[pair.improved])
        values = [g for _, g in gains]
        out.append(
            GainSummary(
                base=pair.base,
                improved=pair.improved,
                at_zero=values[0],
                at_boundary=values[-1],
                low=min(values),
                high=max(values),
            )
        )
    return out


def run_figure(
    preset: FigurePreset,
    sample: SampleConfig,
    out_dir: Path,
    *,
    workers: int | None = None,
) -> FigureResult:
    prob = preset.problem
    labels = [describe(spec) for spec in preset.specs]
    files: list[Path] = []

    t = default_t_grid()
    columns = {
        label: multiplier(spec, t, prob)
        for label, spec in zip(labels, preset.specs, strict=True)
    }
    files.append(
        write_table_csv(
            out_dir / f"{preset.slug}_multipliers.csv",
            {"t": t, **columns},
            problem=prob,
            seed=sample.seed,
        )
    )
    files.append(
        write_chart(
            out_dir / f"{preset.slug}_multipliers.svg",
            multiplier_chart(f"{preset.title}: multipliers", t, columns),
        )
    )

    grid = lambda_grid(prob, preset.lambda_points)
    computed = risk_curves(preset.specs, prob, grid, sample, workers=workers)
    curves = dict(zip(labels, computed, strict=True))
    for label, curve in curves.items():
        files.append(write_curve_csv(out_dir / f"{preset.slug}_{label}.csv", curve, sample))
    files.append(
        write_chart(
            out_dir / f"{preset.slug}_risks.svg",
            risk_chart(f"{preset.title}: risks", list(curves.values()), list(curves)),
        )
    )

    gains = _summarize(preset, curves)
    events.emit(
        "cli",
        "info",
        "figure_done",
        f"{preset.slug}: {len(curves)} curves, {len(files)} files",
        context={"slug": preset.slug, "problem": prob.label()},
    )
    return FigureResult(preset=preset, curves=curves, gains=gains, files=files)


def _pct(value: float) -> str:
    return f"{100 * value:.1f}%"


def format_summary(results: Iterable[FigureResult], sample: SampleConfig) -> str:
    lines = [f"# seed={sample.seed}", f"# replicates={sample.replicates}", ""]
    for result in results:
        preset = result.preset
        lines.append(f"[{preset.slug}] {preset.title} ({preset.problem.label()})")
        if preset.notes:
            lines.append(f"  note: {preset.notes}")
        for g in result.gains:
            lines.append(
                f"  gain of {g.improved} over {g.base}: "
                f"lambda=0 {_pct(g.at_zero)}, lambda=m {_pct(g.at_boundary)}, "
                f"range [{_pct(g.low)}, {_pct(g.high)}]"
            )
        lines.append("")
    return "\n".join(lines)


def run_figures(
    presets: Iterable[FigurePreset],
    sample: SampleConfig,
    out_dir: Path,
    *,
    workers: int | None = None,
) -> list[FigureResult]:
    """Run every preset and write ``summary.txt`` after all of them finish."""
    results = []
    for preset in presets:
        logger.info("Figure %s (%s)", preset.slug, preset.problem.label())
        results.append(run_figure(preset, sample, out_dir, workers=workers))
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = out_dir / "summary.txt"
    summary.write_text(format_summary(results, sample), encoding="utf-8")
    logger.info("Wrote %s", summary)
    return results
