"""CSV files for risk curves and multiplier tables.

Values are written with 12 significant digits under ``#`` provenance lines,
and nothing run-dependent (timestamps, hostnames) goes into a file, so equal
inputs give byte-identical outputs.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Mapping, Sequence
from pathlib import Path

from snrbound.config import settings
from snrbound.models import Problem, RiskCurve, RiskPoint, SampleConfig, parse_spec, spec_to_json
from snrbound.specfun import FloatArray

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ("lambda", "estimate", "std_error", "replicates")


def fmt(value: float) -> str:
    return f"{value:.12g}"


def _provenance(
    problem: Problem, seed: int, replicates: int | None, extra: Mapping[str, str]
) -> list[str]:
    lines = [f"# problem={problem.model_dump_json()}", f"# seed={seed}"]
    if replicates is not None:
        lines.append(f"# replicates={replicates}")
    lines += [f"# {key}={value}" for key, value in extra.items()]
    return lines


def write_curve_csv(path: Path, curve: RiskCurve, cfg: SampleConfig) -> Path:
    """Write ``lambda,estimate,std_error,replicates`` rows for one curve."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _provenance(
        curve.problem, cfg.seed, cfg.replicates, {"spec": spec_to_json(curve.spec)}
    )
    with open(path, "w", newline="", encoding="utf-8") as f:
        for line in header:
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for pt in curve.points:
            writer.writerow([fmt(pt.lam), fmt(pt.estimate), fmt(pt.std_error), pt.replicates])
    logger.debug("Wrote %d risk points to %s", len(curve.points), path)
    return path


def _read_comments(path: Path) -> tuple[dict[str, str], list[str]]:
    meta: dict[str, str] = {}
    rows: list[str] = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            else:
                rows.append(line)
    return meta, rows


def read_curve_csv(path: Path) -> RiskCurve:
    """Read a file written by :func:`write_curve_csv`."""
    meta, rows = _read_comments(path)
    if "problem" not in meta or "spec" not in meta:
        raise ValueError(f"{path} lacks the problem/spec provenance lines")
    reader = csv.DictReader(rows)
    points = [
        RiskPoint(
            lam=float(row["lambda"]),
            estimate=float(row["estimate"]),
            std_error=float(row["std_error"]),
            replicates=int(row["replicates"]),
        )
        for row in reader
    ]
    return RiskCurve(
        problem=Problem.model_validate_json(meta["problem"]),
        spec=parse_spec(meta["spec"]),
        points=tuple(points),
    )


def write_table_csv(
    path: Path,
    columns: Mapping[str, Sequence[float] | FloatArray],
    *,
    problem: Problem,
    seed: int | None = None,
    comments: Mapping[str, str] | None = None,
) -> Path:
    """Write equal-length numeric columns, first column first.

    ``seed`` defaults to ``settings.default_seed``; tables carry no replicate count.
    """
    seed = settings.default_seed if seed is None else seed
    lengths = {len(values) for values in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns differ in length: {sorted(lengths)}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        for line in _provenance(problem, seed, None, comments or {}):
            f.write(line + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(columns))
        for row in zip(*columns.values(), strict=True):
            writer.writerow([fmt(float(v)) for v in row])
    return path
