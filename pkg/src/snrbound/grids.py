"""Evaluation grids for t, z and lambda."""

from __future__ import annotations

import numpy as np

from snrbound.models import GridSpec, Problem
from snrbound.specfun import FloatArray

T_GRID_RANGE = (1e-4, 1e4)
T_GRID_POINTS = 200
Z_GRID_RANGE = (1e-3, 700.0)
Z_GRID_POINTS = 100


def parse_grid(text: str) -> GridSpec:
    """Parse ``lo:hi:n`` or ``lo:hi:n:log``.

    Raises ValueError (or pydantic's ValidationError) on malformed input.
    """
    parts = text.strip().split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"grid must look like lo:hi:n[:log], got {text!r}")
    if len(parts) == 4 and parts[3] != "log":
        raise ValueError(f"unknown grid modifier {parts[3]!r}, expected 'log'")
    return GridSpec(lo=float(parts[0]), hi=float(parts[1]), n=int(parts[2]), log=len(parts) == 4)


def grid_values(grid: GridSpec) -> FloatArray:
    if grid.n == 1:
        return np.array([grid.lo])
    if grid.log:
        return np.geomspace(grid.lo, grid.hi, grid.n)
    return np.linspace(grid.lo, grid.hi, grid.n)


def describe_grid(grid: GridSpec) -> str:
    kind = "log-spaced" if grid.log else "equispaced"
    return f"{grid.n} {kind} points in [{grid.lo:g}, {grid.hi:g}]"


def default_t_grid() -> FloatArray:
    """200 log-spaced points in [1e-4, 1e4] plus t = 0 and t = inf."""
    inner = np.geomspace(*T_GRID_RANGE, T_GRID_POINTS)
    return np.concatenate(([0.0], inner, [np.inf]))


DEFAULT_T_GRID_DESCRIPTION = (
    f"t in {{0, inf}} + {T_GRID_POINTS} log-spaced points in "
    f"[{T_GRID_RANGE[0]:g}, {T_GRID_RANGE[1]:g}]"
)


def default_z_grid() -> FloatArray:
    """100 log-spaced points in [1e-3, 700]."""
    return np.geomspace(*Z_GRID_RANGE, Z_GRID_POINTS)


DEFAULT_Z_GRID_DESCRIPTION = (
    f"z in {Z_GRID_POINTS} log-spaced points in [{Z_GRID_RANGE[0]:g}, {Z_GRID_RANGE[1]:g}]"
)


def lambda_grid(prob: Problem, n: int) -> FloatArray:
    """n equispaced lambda values on [0, m], the last one exactly m."""
    values = np.linspace(0.0, prob.m, n)
    values[-1] = prob.m
    return values
