"""Structural and score-based comparison of staged tree models.

Stage labels are arbitrary identifiers, so the Hamming distance between
stagings is minimized over per-depth label bijections; the minimization is
an optimal assignment on the label co-occurrence table (maximizing
agreements is the same as minimizing disagreements).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .estimation import ModelScore
from .tree import Staging

__all__ = [
    "ComparisonReport",
    "hamming_distance",
    "relative_bic",
    "relative_hd",
    "median_aggregate",
]


@dataclass(frozen=True)
class ComparisonReport:
    """Pairwise comparison of two fitted models, optionally against a truth."""

    hd: int
    delta_bic: float
    delta_hd: float | None
    wall_time_s: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "hd": self.hd,
            "delta_bic": self.delta_bic,
            "delta_hd": self.delta_hd,
            "wall_time_s": list(self.wall_time_s),
        }


def hamming_distance(a: Staging, b: Staging) -> int:
    """Stage disagreements between two stagings, minimized over label bijections."""
    if a.tree != b.tree:
        raise ValidationError("stagings belong to different trees")
    total = 0
    for d in range(a.tree.p):
        la, lb = a.labels[d], b.labels[d]
        ka, kb = a.n_stages(d), b.n_stages(d)
        table = np.zeros((ka, kb), dtype=np.int64)
        np.add.at(table, (la, lb), 1)
        rows, cols = linear_sum_assignment(table, maximize=True)
        total += int(la.shape[0] - table[rows, cols].sum())
    return total


def relative_bic(model: ModelScore, baseline: ModelScore) -> float:
    """(BIC(model) - BIC(baseline)) / |BIC(baseline)|."""
    if baseline.bic == 0:
        raise ValidationError("relative BIC undefined for a zero-BIC baseline")
    return (model.bic - baseline.bic) / abs(baseline.bic)


def relative_hd(model: Staging, baseline: Staging, truth: Staging) -> float:
    """Hamming distance to truth, relative to the baseline's.

    Returns NaN when the baseline already matches the truth (zero
    denominator); callers exclude such replications from medians.
    """
    denom = hamming_distance(baseline, truth)
    if denom == 0:
        return math.nan
    return (hamming_distance(model, truth) - denom) / denom


def median_aggregate(values) -> float:
    """Standard median; even counts average the two central values."""
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise ValidationError("median of an empty list")
    if not np.all(np.isfinite(values)):
        raise ValidationError("median over non-finite values")
    return float(np.median(values))
