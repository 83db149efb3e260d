#!/usr/bin/env python3
"""Full acceptance run: figure gains, risk orderings and every verification suite.

Usage: python scripts/run_acceptance.py [--replicates N] [--workers W] [--out DIR]

Prints one PASS/FAIL line per criterion and exits 1 if any criterion fails.
Gains of the alternate (5, 10, 2) configuration are printed but not asserted.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from snrbound.analysis import SuiteContext, run_suite, suite_passed  # noqa: E402
from snrbound.cli.figures import FigureResult, load_presets, run_figure  # noqa: E402
from snrbound.config import settings  # noqa: E402
from snrbound.estimators import describe  # noqa: E402
from snrbound.grids import lambda_grid  # noqa: E402
from snrbound.models import (  # noqa: E402
    DEFAULT_LAMBDA_POINTS,
    BoundaryUniform,
    Mle,
    Problem,
    SampleConfig,
    Suite,
    Unbiased,
)
from snrbound.risk import mc_risk, mc_risk_difference  # noqa: E402

logger = logging.getLogger("acceptance")

K = settings.se_multiplier


def _gain(result: FigureResult, base: str, improved: str) -> tuple[float, float, float, float]:
    g = next(g for g in result.gains if g.base == base and g.improved == improved)
    return g.at_zero, g.at_boundary, g.low, g.high


def flat_risk(sample: SampleConfig, workers: int | None) -> tuple[bool, str]:
    prob = Problem(p=5, k=20, m=2.0)
    start = time.monotonic()
    misses: list[str] = []
    for lam in (0.0, 1.0, 2.0):
        point = mc_risk(Unbiased(), lam, prob, sample, workers=workers)
        if abs(point.estimate - prob.p) > K * point.std_error:
            misses.append(f"lambda={lam}: {point.estimate:.4f} (se {point.std_error:.4f})")
    elapsed = time.monotonic() - start
    return not misses, "; ".join(misses) or f"R(ub) = 5 within {K} SE, {elapsed:.1f}s"


def envelope_figure(result: FigureResult) -> tuple[bool, str]:
    at_zero, at_m, _, _ = _gain(result, "mle", "bu_l0")
    ok = at_zero > 0.48 and abs(at_m - 0.12) <= 0.04
    return ok, f"gain at 0 {100 * at_zero:.1f}%, at m {100 * at_m:.1f}%"


def paired_order(sample: SampleConfig, workers: int | None) -> tuple[bool, str]:
    """R(worse) - R(better) >= -K SE on common draws at every grid lambda."""
    prob = Problem(p=5, k=20, m=2.0)
    grid = lambda_grid(prob, DEFAULT_LAMBDA_POINTS)
    misses: list[str] = []
    for worse, better in ((Mle(), BoundaryUniform()), (Unbiased(), Mle())):
        for lam in grid:
            diff = mc_risk_difference(worse, better, float(lam), prob, sample, workers=workers)
            if not diff.within(K):
                misses.append(f"{describe(worse)} vs {describe(better)} at lambda={lam:.3g}")
    detail = "; ".join(misses) or f"2 pairs x {grid.size} lambda points within {K} SE"
    return not misses, detail


def crossing_figure(result: FigureResult) -> tuple[bool, str]:
    _, _, low, high = _gain(result, "mle", "bu_l0")
    return 0.03 <= low and high <= 0.25, f"gain range [{100 * low:.1f}%, {100 * high:.1f}%]"


def radius_comparison(sample: SampleConfig, workers: int | None) -> tuple[bool, str]:
    prob = Problem(p=3, k=20, m=3.0)
    inner, outer = BoundaryUniform(radius=2.5), BoundaryUniform()
    notes: list[str] = []
    ok = True
    for lam, better in ((0.0, True), (1.0, True), (3.0, False)):
        diff = mc_risk_difference(inner, outer, lam, prob, sample, workers=workers)
        z = diff.estimate / diff.std_error
        ok &= z <= -K if better else z >= K
        notes.append(f"lambda={lam}: {z:+.1f} SE")
    return ok, ", ".join(notes)


def suite(name: Suite, sample: SampleConfig, workers: int | None) -> Callable[[], tuple[bool, str]]:
    def check() -> tuple[bool, str]:
        reports = run_suite(name, SuiteContext(sample=sample, workers=workers))
        blocking = [r.name for r in reports if r.blocking]
        return suite_passed(reports), ", ".join(blocking) or f"{len(reports)} reports"

    return check


def main() -> int:
    parser = argparse.ArgumentParser(description="snrbound acceptance run")
    parser.add_argument("--replicates", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=settings.default_seed)
    parser.add_argument("--workers", type=int, default=settings.max_workers)
    parser.add_argument("--out", type=Path, default=settings.output_dir / "acceptance")
    args = parser.parse_args()

    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    figure_sample = SampleConfig(replicates=args.replicates, seed=args.seed)
    paired_sample = SampleConfig(replicates=min(args.replicates, 400_000), seed=args.seed)
    universal_sample = SampleConfig(replicates=min(args.replicates, 200_000), seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    figures = {
        preset.slug: run_figure(preset, figure_sample, args.out, workers=args.workers)
        for preset in load_presets(["envelope_k20", "envelope_k10", "crossing_p5"])
    }
    alt_zero, alt_m, _, _ = _gain(figures["envelope_k10"], "mle", "bu_l0")
    logger.info("(5, 10, 2): gain at 0 %.1f%%, at m %.1f%%", 100 * alt_zero, 100 * alt_m)

    w = args.workers
    criteria: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("1 flat risk of X", lambda: flat_risk(figure_sample, w)),
        ("2 (5, 20, 2) gains", lambda: envelope_figure(figures["envelope_k20"])),
        ("2 paired ordering on 21 points", lambda: paired_order(figure_sample, w)),
        ("3 (5, 20, 3) gains", lambda: crossing_figure(figures["crossing_p5"])),
        ("3 radius 2.5 at (3, 20, 3)", lambda: radius_comparison(paired_sample, w)),
        ("4 and 6 multiplier properties", suite(Suite.H_PROPERTIES, paired_sample, w)),
        ("5 lower bound on R(z)", suite(Suite.R1_INEQUALITY, paired_sample, w)),
        ("7 risk decomposition", suite(Suite.DECOMPOSITION, paired_sample, w)),
        ("8 radial mixture oracle", suite(Suite.RADIAL_MIXTURE, paired_sample, w)),
        ("9 universal dominance", suite(Suite.UNIVERSAL, universal_sample, w)),
        ("10 special functions", suite(Suite.SPECFUN, figure_sample, w)),
    ]

    failed = 0
    for name, check in criteria:
        ok, detail = check()
        failed += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    print(f"\n{len(criteria) - failed}/{len(criteria)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
