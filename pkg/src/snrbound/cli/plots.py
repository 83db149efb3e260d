"""Polyline SVG charts rendered from a jinja2 template."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from jinja2 import Environment, PackageLoader, select_autoescape

from snrbound.models import RiskCurve
from snrbound.specfun import FloatArray

logger = logging.getLogger(__name__)

WIDTH = 640
HEIGHT = 420
MARGIN = {"left": 64, "right": 20, "top": 32, "bottom": 48}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")

_env = Environment(
    loader=PackageLoader("snrbound.cli", "templates"),
    autoescape=select_autoescape(["svg", "j2"]),
    trim_blocks=True,
    keep_trailing_newline=True,
)


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float] | FloatArray
    y: Sequence[float] | FloatArray


@dataclass(frozen=True)
class _Tick:
    pos: float
    label: str


def _finite_points(series: Series, log_x: bool) -> tuple[FloatArray, FloatArray]:
    x = np.asarray(series.x, dtype=np.float64)
    y = np.asarray(series.y, dtype=np.float64)
    keep = np.isfinite(x) & np.isfinite(y)
    if log_x:
        keep &= x > 0
        x = np.where(keep, x, 1.0)
        x = np.log10(x)
    return x[keep], y[keep]


def _linear_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    span = hi - lo
    raw = span / count
    step = 10 ** math.floor(math.log10(raw))
    for factor in (1, 2, 5, 10):
        if raw <= factor * step:
            step *= factor
            break
    start = math.ceil(lo / step) * step
    ticks = []
    value = start
    while value <= hi + 1e-9 * span:
        ticks.append(round(value, 12))
        value += step
    return ticks


def render_chart(
    title: str,
    x_label: str,
    y_label: str,
    series: Sequence[Series],
    *,
    log_x: bool = False,
) -> str:
    """SVG text of one chart. Non-finite points (and x <= 0 on a log axis) are skipped."""
    data = [(s.label, *_finite_points(s, log_x)) for s in series]
    data = [(label, x, y) for label, x, y in data if x.size]
    if not data:
        raise ValueError(f"chart {title!r} has no finite points")
    x_all = np.concatenate([x for _, x, _ in data])
    y_all = np.concatenate([y for _, _, y in data])
    x_lo, x_hi = float(x_all.min()), float(x_all.max())
    y_lo, y_hi = min(float(y_all.min()), 0.0), float(y_all.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    y_hi += 0.05 * (y_hi - y_lo)

    left, top = MARGIN["left"], MARGIN["top"]
    right, bottom = WIDTH - MARGIN["right"], HEIGHT - MARGIN["bottom"]

    def px(v: float) -> float:
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left)

    def py(v: float) -> float:
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top)

    if log_x:
        x_ticks = [
            _Tick(px(e), f"1e{e:d}")
            for e in range(math.ceil(x_lo), math.floor(x_hi) + 1)
        ]
    else:
        x_ticks = [_Tick(px(v), f"{v:g}") for v in _linear_ticks(x_lo, x_hi)]
    y_ticks = [_Tick(py(v), f"{v:g}") for v in _linear_ticks(y_lo, y_hi)]

    lines = [
        {
            "label": label,
            "color": PALETTE[i % len(PALETTE)],
            "points": " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y, strict=True)),
        }
        for i, (label, x, y) in enumerate(data)
    ]
    return _env.get_template("chart.svg.j2").render(
        title=title,
        x_label=x_label,
        y_label=y_label,
        width=WIDTH,
        height=HEIGHT,
        plot={"left": left, "right": right, "top": top, "bottom": bottom},
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        lines=lines,
    )


def write_chart(path: Path, svg: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    logger.debug("Wrote chart %s", path)
    return path


def risk_chart(title: str, curves: Sequence[RiskCurve], labels: Sequence[str]) -> str:
    series = [
        Series(label, curve.lambdas, curve.estimates)
        for label, curve in zip(labels, curves, strict=True)
    ]
    return render_chart(title, "lambda", "risk", series)


def multiplier_chart(
    title: str, t: FloatArray, columns: dict[str, FloatArray]
) -> str:
    series = [Series(label, t, values) for label, values in columns.items()]
    return render_chart(title, "t", "h(t)", series, log_x=True)
