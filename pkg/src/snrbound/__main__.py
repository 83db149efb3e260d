"""snrbound CLI: unified entry point.

Usage:
    snrbound multiplier  [--p 5 --k 20 --m 2] [--spec JSON ...] [--t-grid lo:hi:n[:log]]
    snrbound risk-curve  [--spec JSON ...] [--lambda-grid lo:hi:n] [--replicates N] [--svg]
    snrbound dominance   [--spec JSON ...]     # envelope violations + truncation
    snrbound verify SUITE                      # specfun, h-properties, r1-inequality, ...
    snrbound figures     [--only SLUG ...]     # presets from config/figures

Common flags: --config run.json, --out DIR, --seed, --workers, --verbose.
Flags override values from --config. Without --spec the estimators are
the unbiased rule, the MLE and the boundary-uniform rule (--l, --radius).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path
from typing import Any

from pydantic import TypeAdapter, ValidationError

from snrbound import events
from snrbound.config import settings
from snrbound.errors import (
    ConfigurationError,
    DomainError,
    EvaluationError,
    IdentityTruncationAdvisory,
)
from snrbound.grids import (
    DEFAULT_T_GRID_DESCRIPTION,
    default_t_grid,
    describe_grid,
    grid_values,
    lambda_grid,
    parse_grid,
)
from snrbound.models import (
    OutputFormat,
    RunConfig,
    SampleConfig,
    Suite,
    VerificationReport,
    spec_to_json,
)

logger = logging.getLogger("snrbound")

DEFAULT_PROBLEM = {"p": 5, "k": 20, "m": 2.0}


class UsageError(Exception):
    """Bad command-line input, reported as ``error: <field>: <message>``."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(message)
        self.field = field


def _first_message(exc: ValueError) -> str:
    if isinstance(exc, ValidationError):
        return str(exc.errors()[0]["msg"])
    return str(exc)


# --- RunConfig assembly ---


def _load_config_file(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError("config", f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config", f"{path} must hold a JSON object")
    return data


def _default_specs(args: argparse.Namespace) -> list[dict[str, Any]]:
    bu: dict[str, Any] = {"kind": "boundary_uniform", "l": args.l}
    if args.radius is not None:
        bu["radius"] = args.radius
    return [{"kind": "unbiased"}, {"kind": "mle"}, bu]


def _parse_grid_flag(text: str | None, field: str) -> Any:
    if text is None:
        return None
    try:
        return parse_grid(text).model_dump()
    except ValueError as exc:
        raise UsageError(field, _first_message(exc)) from exc


def _sample_data(args: argparse.Namespace, data: dict[str, Any]) -> dict[str, Any]:
    sample = dict(data.get("sample") or {})
    sample.setdefault("replicates", settings.replicates)
    sample.setdefault("seed", settings.default_seed)
    sample.setdefault("chunk_size", settings.chunk_size)
    if args.replicates is not None:
        sample["replicates"] = args.replicates
    if args.seed is not None:
        sample["seed"] = args.seed
    return sample


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from --config overlaid with the command-line flags."""
    data = _load_config_file(args.config)
    problem = dict(data.get("problem") or DEFAULT_PROBLEM)
    for key in ("p", "k", "m"):
        value = getattr(args, key)
        if value is not None:
            problem[key] = value
    data["problem"] = problem

    if args.spec:
        specs = []
        for text in args.spec:
            try:
                specs.append(json.loads(text))
            except json.JSONDecodeError as exc:
                raise UsageError("spec", f"{text!r} is not valid JSON: {exc}") from exc
        data["specs"] = specs
    elif "specs" not in data:
        data["specs"] = _default_specs(args)

    for field in ("lambda_grid", "t_grid"):
        grid = _parse_grid_flag(getattr(args, field), field)
        if grid is not None:
            data[field] = grid
    data["sample"] = _sample_data(args, data)
    if args.out is not None:
        data["output_dir"] = args.out
    data.setdefault("output_dir", settings.output_dir)
    formats = set(data.get("formats") or ["csv"])
    if getattr(args, "svg", False):
        formats.add("svg")
    data["formats"] = sorted(formats)
    if args.workers is not None:
        data["workers"] = args.workers
    data.setdefault("workers", settings.max_workers)
    return RunConfig.model_validate(data)


def _problem_given(args: argparse.Namespace) -> bool:
    if any(getattr(args, key) is not None for key in ("p", "k", "m")):
        return True
    return "problem" in _load_config_file(args.config)


# --- Commands ---


def cmd_multiplier(args: argparse.Namespace) -> int:
    """Multiplier table over the t grid: printed and written to multipliers.csv."""
    from snrbound.cli.plots import multiplier_chart, write_chart
    from snrbound.estimators import describe, multiplier
    from snrbound.risk import write_table_csv

    cfg = build_run_config(args)
    t = grid_values(cfg.t_grid) if cfg.t_grid is not None else default_t_grid()
    columns = {describe(spec): multiplier(spec, t, cfg.problem) for spec in cfg.specs}
    path = write_table_csv(
        cfg.output_dir / "multipliers.csv",
        {"t": t, **columns},
        problem=cfg.problem,
        seed=cfg.sample.seed,
    )
    sys.stdout.write(path.read_text(encoding="utf-8"))
    if OutputFormat.SVG in cfg.formats:
        write_chart(
            cfg.output_dir / "multipliers.svg",
            multiplier_chart(f"Multipliers, {cfg.problem.label()}", t, columns),
        )
    return 0


def cmd_risk_curve(args: argparse.Namespace) -> int:
    """One risk CSV per spec on common draws, plus an overlay chart with --svg."""
    from snrbound.cli.plots import risk_chart, write_chart
    from snrbound.estimators import describe
    from snrbound.risk import risk_curves, write_curve_csv

    cfg = build_run_config(args)
    lams = (
        grid_values(cfg.lambda_grid)
        if cfg.lambda_grid is not None
        else lambda_grid(cfg.problem, settings.lambda_points)
    )
    curves = risk_curves(cfg.specs, cfg.problem, lams, cfg.sample, workers=cfg.workers)
    labels = [describe(spec) for spec in cfg.specs]
    for label, curve in zip(labels, curves, strict=True):
        path = write_curve_csv(cfg.output_dir / f"risk_{label}.csv", curve, cfg.sample)
        print(f"  {label:<16} -> {path}")
    if OutputFormat.SVG in cfg.formats:
        write_chart(
            cfg.output_dir / "risks.svg",
            risk_chart(f"Risks, {cfg.problem.label()}", curves, labels),
        )

    print(f"\n{'lambda':>10} " + " ".join(f"{label:>14}" for label in labels))
    for i, lam in enumerate(lams):
        row = " ".join(f"{curve.points[i].estimate:>14.6g}" for curve in curves)
        print(f"{lam:>10.4g} {row}")
    return 0


def cmd_dominance(args: argparse.Namespace) -> int:
    """Envelope violation set and dominating truncation of every spec -> dominance.json."""
    from snrbound.analysis import (
        build_dominating_truncation,
        envelope_violation_set,
        midpoint_dominance_check,
    )
    from snrbound.estimators import describe

    cfg = build_run_config(args)
    if cfg.t_grid is not None:
        t = grid_values(cfg.t_grid)
        grid_text = describe_grid(cfg.t_grid)
    else:
        t = default_t_grid()
        grid_text = DEFAULT_T_GRID_DESCRIPTION

    entries = []
    for spec in cfg.specs:
        label = describe(spec)
        violations = envelope_violation_set(spec, cfg.problem, t)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", IdentityTruncationAdvisory)
            dominating = build_dominating_truncation(spec, cfg.problem, t)
        midpoint = midpoint_dominance_check(
            spec, dominating, cfg.problem, t, grid_description=grid_text
        )
        entries.append(
            {
                "label": label,
                "spec": json.loads(spec_to_json(spec)),
                "violation_count": len(violations),
                "violation_range": [violations[0], violations[-1]] if violations else None,
                "truncated": json.loads(spec_to_json(dominating)) if violations else None,
                "advisory": [str(w.message) for w in caught] or None,
                "midpoint": midpoint.model_dump(mode="json", by_alias=True),
            }
        )
        if violations:
            print(
                f"  {label:<16} exceeds the envelope at {len(violations)} points, "
                f"t in [{violations[0]:.4g}, {violations[-1]:.4g}]"
            )
            print(f"  {'':<16} dominated by {spec_to_json(dominating)}")
        else:
            print(f"  {label:<16} stays below the envelope")

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / "dominance.json"
    document = {
        "problem": cfg.problem.model_dump(mode="json"),
        "grid": grid_text,
        "specs": entries,
    }
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    """Run one suite; exit 0 iff every asserted report passes."""
    from snrbound.analysis import SuiteContext, run_suite, suite_passed

    cfg = build_run_config(args)
    ctx = SuiteContext(
        sample=cfg.sample,
        problem=cfg.problem if _problem_given(args) else None,
        workers=cfg.workers,
    )
    reports = run_suite(args.suite, ctx)
    adapter = TypeAdapter(list[VerificationReport])
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / f"verify_{args.suite}.json"
    path.write_bytes(adapter.dump_json(reports, by_alias=True, indent=2) + b"\n")

    for report in reports:
        status = "PASS" if report.passed else ("FAIL" if report.asserted else "NOTE")
        print(f"  [{status}] {report.name} ({report.checks} checks, {report.grid_description})")
        for violation in report.violations[:3]:
            print(f"         {violation.relation} at {violation.inputs}: "
                  f"{violation.lhs:.6g} vs {violation.rhs:.6g}")
        if report.notes:
            print(f"         {report.notes}")
    passed = suite_passed(reports)
    print(f"\n{args.suite}: {'passed' if passed else 'FAILED'} -> {path}")
    return 0 if passed else 1


def cmd_figures(args: argparse.Namespace) -> int:
    """Reproduce the figure presets: CSV, SVG and summary.txt."""
    from snrbound.cli.figures import load_presets, run_figures

    sample = SampleConfig.model_validate(_sample_data(args, _load_config_file(args.config)))
    out_dir = args.out or settings.output_dir
    presets = load_presets(args.only)
    results = run_figures(presets, sample, out_dir, workers=args.workers)
    for result in results:
        for gain in result.gains:
            print(
                f"  {result.preset.slug:<10} {gain.improved} vs {gain.base}: "
                f"{100 * gain.at_zero:.1f}% at lambda=0, "
                f"{100 * gain.at_boundary:.1f}% at lambda=m"
            )
    print(f"\nsummary -> {out_dir / 'summary.txt'}")
    return 0


# --- Entry point ---


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON run config (flags override it)")
    parser.add_argument("--replicates", type=int, help="Monte Carlo replicates per point")
    parser.add_argument("--seed", type=int, help=f"Base seed (default {settings.default_seed})")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--workers", type=int, help="Worker threads for Monte Carlo chunks")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")


def _add_problem(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, help="Dimension of X")
    parser.add_argument("--k", type=int, help="Degrees of freedom of S^2")
    parser.add_argument("--m", type=float, help="Bound on |theta|/sigma")
    parser.add_argument("--l", type=float, default=0.0, help="Prior exponent of the BU rule")
    parser.add_argument("--radius", type=float, help="Sphere radius of the BU rule")
    parser.add_argument(
        "--spec", action="append", help="Estimator spec as JSON (repeatable)"
    )
    parser.add_argument("--lambda-grid", dest="lambda_grid", help="lo:hi:n")
    parser.add_argument("--t-grid", dest="t_grid", help="lo:hi:n[:log]")
    parser.add_argument("--svg", action="store_true", help="Also write SVG charts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snrbound",
        description="Multipliers, risks and dominance checks for h(T)X under |theta|/sigma <= m",
    )
    sub = parser.add_subparsers(dest="command", help="Command to run")

    for name, help_text in (
        ("multiplier", "Multiplier table h(t) per spec"),
        ("risk-curve", "Monte Carlo risk curves"),
        ("dominance", "Envelope violations and dominating truncations"),
    ):
        p_cmd = sub.add_parser(name, help=help_text)
        _add_problem(p_cmd)
        _add_common(p_cmd)

    p_verify = sub.add_parser("verify", help="Run a verification suite")
    p_verify.add_argument("suite", choices=[str(s) for s in Suite])
    _add_problem(p_verify)
    _add_common(p_verify)

    p_fig = sub.add_parser("figures", help="Reproduce the figure presets")
    p_fig.add_argument("--only", action="append", help="Preset slug (repeatable)")
    _add_common(p_fig)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.log_level,
        format="%(asctime)s %(levelname)s [%(name)s] %(message)s",
        datefmt="%H:%M:%S",
    )


def _field(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc) or "config"


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 0
    _configure_logging(args.verbose)

    dispatch = {
        "multiplier": cmd_multiplier,
        "risk-curve": cmd_risk_curve,
        "dominance": cmd_dominance,
        "verify": cmd_verify,
        "figures": cmd_figures,
    }
    out_dir: Path = args.out or settings.output_dir
    try:
        code = dispatch[args.command](args)
    except ValidationError as exc:
        for err in exc.errors():
            print(f"error: {_field(err['loc'])}: {err['msg']}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"error: {exc.field}: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, DomainError, FileNotFoundError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 2
    except EvaluationError as exc:
        print(f"error: evaluation: {exc}", file=sys.stderr)
        events.emit("cli", "error", "command_failed", str(exc), context={"cmd": args.command})
        events.write_jsonl(out_dir / "events.jsonl")
        return 1
    events.emit("cli", "info", "command_done", args.command, context={"exit_code": code})
    events.write_jsonl(out_dir / "events.jsonl")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
