"""Monte Carlo and closed-form risk of equivariant estimators."""

from snrbound.risk.affine import affine_dominance_interval, affine_risk, minimax_affine
from snrbound.risk.export import read_curve_csv, write_curve_csv, write_table_csv
from snrbound.risk.montecarlo import (
    DecompositionCheck,
    Moments,
    RiskDifference,
    conditional_decomposition_check,
    mc_risk,
    mc_risk_difference,
    mc_risk_many,
    relative_gain,
    risk_curve,
    risk_curves,
)
from snrbound.risk.sampling import chunk_stream, sample_batch, sample_canonical

__all__ = [
    "DecompositionCheck",
    "Moments",
    "RiskDifference",
    "affine_dominance_interval",
    "affine_risk",
    "chunk_stream",
    "conditional_decomposition_check",
    "mc_risk",
    "mc_risk_difference",
    "mc_risk_many",
    "minimax_affine",
    "read_curve_csv",
    "relative_gain",
    "risk_curve",
    "risk_curves",
    "sample_batch",
    "sample_canonical",
    "write_curve_csv",
    "write_table_csv",
]
