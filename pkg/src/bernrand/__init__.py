"""Computable randomness-deficiency surrogates for finite Bernoulli sequences."""

from .kernels import BACKEND
from .measures import (
    IMPOSSIBLE,
    BitString,
    CountClass,
    MeasureKind,
    MeasureSpec,
    bernoulli_log_prob,
    bernoulli_prob,
    binomial_log_prob,
    binomial_prob,
    log2_binom,
)
from .partition import (
    EstimatorResult,
    Partition,
    a_hat,
    build_partition,
    cell_of,
    cell_width_ratio,
    point_estimate,
    theta,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "IMPOSSIBLE",
    "BitString",
    "CountClass",
    "EstimatorResult",
    "MeasureKind",
    "MeasureSpec",
    "Partition",
    "a_hat",
    "bernoulli_log_prob",
    "bernoulli_prob",
    "binomial_log_prob",
    "binomial_prob",
    "build_partition",
    "cell_of",
    "cell_width_ratio",
    "log2_binom",
    "point_estimate",
    "theta",
]
