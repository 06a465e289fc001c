"""Smoothed conditional probability fitting and BIC scoring.

The estimator for a (pooled) count row v over s values is
(v_x + alpha) / (sum(v) + alpha * s): alpha = 0 gives the MLE, 1 Laplace,
0.5 Jeffreys. Log-likelihood always weights the raw counts by the log of
the smoothed probabilities, so BIC stays comparable across stagings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import CountTable, pool_counts
from .errors import NumericError, ValidationError
from .tree import EventTree, FittedStagedTree, Staging, saturated_staging

__all__ = [
    "ModelScore",
    "smoothed_rows",
    "fit_saturated",
    "refit_pooled",
    "log_likelihood",
    "n_free_params",
    "score_bic",
]


@dataclass(frozen=True)
class ModelScore:
    loglik: float
    n_params: int
    n: int
    bic: float

    @classmethod
    def from_loglik(cls, loglik: float, n_params: int, n: int) -> "ModelScore":
        return cls(loglik, n_params, n, -2.0 * loglik + n_params * math.log(n))


def smoothed_rows(rows: np.ndarray, alpha: float) -> np.ndarray:
    """Row-wise smoothed conditional probabilities."""
    if alpha < 0:
        raise ValidationError("alpha must be nonnegative")
    rows = np.asarray(rows, dtype=np.float64)
    sums = rows.sum(axis=1, keepdims=True)
    if alpha == 0.0 and np.any(sums == 0):
        raise NumericError("alpha = 0 with a zero-sum count row: conditional undefined")
    return (rows + alpha) / (sums + alpha * rows.shape[1])


def refit_pooled(counts: CountTable, staging: Staging, alpha: float = 1.0) -> FittedStagedTree:
    """Fit one smoothed probability vector per stage from pooled counts."""
    pooled = pool_counts(counts, staging)
    theta = [smoothed_rows(block, alpha) for block in pooled]
    return FittedStagedTree(counts.tree, staging, theta, n=counts.n, alpha=alpha)


def fit_saturated(counts: CountTable, alpha: float = 1.0) -> FittedStagedTree:
    """Fit the finest staging: every situation its own stage."""
    return refit_pooled(counts, saturated_staging(counts.tree), alpha)


def log_likelihood(model: FittedStagedTree, counts: CountTable) -> float:
    """Sum of count-weighted log transition probabilities."""
    if model.tree != counts.tree:
        raise ValidationError("model and counts belong to different trees")
    pooled = pool_counts(counts, model.staging)
    total = 0.0
    for block, theta in zip(pooled, model.theta):
        mask = block > 0
        if np.any(theta[mask] == 0.0):
            raise NumericError("zero probability with positive count: log-likelihood -inf")
        total += float((block[mask] * np.log(theta[mask])).sum())
    return total


def n_free_params(staging: Staging, tree: EventTree) -> int:
    """Stages at each depth times (branching - 1), summed over depths."""
    if staging.tree != tree:
        raise ValidationError("staging belongs to a different tree")
    return sum(staging.n_stages(d) * (tree.branching(d) - 1) for d in range(tree.p))


def score_bic(model: FittedStagedTree, counts: CountTable) -> ModelScore:
    """BIC = -2 loglik + n_params * log(n); lower is better."""
    if counts.n < 1:
        raise ValidationError("BIC needs at least one observation")
    return ModelScore.from_loglik(
        log_likelihood(model, counts),
        n_free_params(model.staging, model.tree),
        counts.n,
    )
