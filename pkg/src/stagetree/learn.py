"""Stage structure learners.

`learn_hclust` clusters each depth's smoothed conditional vectors with a
chosen simplex dissimilarity and linkage, cutting the dendrogram either at
a fixed number of stages or at the BIC-minimizing cut. `learn_bhc` is the
greedy baseline: start saturated and keep merging the stage pair with the
largest BIC decrease. Both process depths independently, keep the root as
a singleton stage, and refit by pooling counts within stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import kernels
from .data import CountTable
from .errors import ValidationError
from .estimation import fit_saturated, refit_pooled, smoothed_rows
from .hcluster import Dendrogram, agglomerate, cut, resolve_linkage
from .metrics import Metric, pairwise_matrix, resolve_metric
from .tree import EventTree, FittedStagedTree, Staging, canonical_labels

__all__ = ["LearnConfig", "learn_hclust", "select_k", "learn_bhc", "baseline_full"]

KValue = Union[int, str, None]


@dataclass(frozen=True)
class LearnConfig:
    """Configuration for the clustering learner.

    ``k`` is "auto", a single stage count applied at every depth, or a
    sequence with one entry (int or "auto") per depth from 1 to p-1.
    """

    metric: str = "totalvariation"
    linkage: str = "ward.D2"
    k: KValue | Sequence[KValue] = "auto"
    alpha: float = 1.0
    kappa: float = 0.5

    def __post_init__(self):
        resolve_linkage(self.linkage)
        if self.alpha < 0:
            raise ValidationError("alpha must be nonnegative")
        if self.resolved_metric().needs_positivity and self.alpha == 0:
            raise ValidationError(
                f"{self.metric} requires strictly positive vectors; use alpha > 0"
            )

    def resolved_metric(self) -> Metric:
        return resolve_metric(self.metric, self.kappa)

    def k_per_depth(self, tree: EventTree) -> list[int | None]:
        """One entry per depth 1..p-1; None means BIC-selected."""
        spec = self.k
        if isinstance(spec, (str, int)) or spec is None:
            spec = [spec] * (tree.p - 1)
        spec = list(spec)
        if len(spec) != tree.p - 1:
            raise ValidationError(
                f"k spec has {len(spec)} entries, expected {tree.p - 1}"
            )
        out: list[int | None] = []
        for d, entry in enumerate(spec, start=1):
            if entry is None or (isinstance(entry, str) and entry.lower() == "auto"):
                out.append(None)
                continue
            k = int(entry)
            if not 1 <= k <= tree.n_situations(d):
                raise ValidationError(
                    f"k={k} invalid at depth {d} with {tree.n_situations(d)} situations"
                )
            out.append(k)
        return out


def select_k(dendrogram: Dendrogram, counts: CountTable, depth: int, alpha: float) -> int:
    """BIC-minimizing number of clusters for one depth's dendrogram.

    Depth scores are additive in the global BIC, so only this depth is
    refit: walking the merges updates the pooled log-likelihood in O(1)
    per candidate k. Ties go to the smallest k.
    """
    rows = counts.tables[depth].astype(np.float64)
    m = dendrogram.n_items
    if m != rows.shape[0]:
        raise ValidationError("dendrogram does not match this depth")
    if m == 1:
        return 1
    s = rows.shape[1]
    log_n = math.log(counts.n)
    pairs = dendrogram.merges[:, :2].astype(np.int64)
    deltas = kernels.merge_ll_deltas(rows, pairs, float(alpha))
    base = float(_pooled_loglik(rows, alpha).sum())
    # log-likelihood of each cut, from k = m down to k = 1
    totals = base + np.concatenate(([0.0], np.cumsum(deltas)))
    ks = np.arange(m, 0, -1)
    scores = -2.0 * totals + ks * (s - 1) * log_n
    # reversed argmin keeps the smallest k on ties
    best = len(scores) - 1 - int(np.argmin(scores[::-1]))
    return int(ks[best])


def _pooled_loglik(rows: np.ndarray, alpha: float) -> np.ndarray:
    """Row-wise count-weighted log of the rows' own smoothed probabilities."""
    rows = np.atleast_2d(rows)
    denom = rows.sum(axis=1, keepdims=True) + alpha * rows.shape[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(rows > 0, rows * (np.log(rows + alpha) - np.log(denom)), 0.0)
    return term.sum(axis=1)


def learn_hclust(counts: CountTable, cfg: LearnConfig | None = None) -> FittedStagedTree:
    """Learn a staging by per-depth hierarchical clustering, then refit."""
    cfg = cfg or LearnConfig()
    tree = counts.tree
    metric = cfg.resolved_metric()
    ks = cfg.k_per_depth(tree)
    labels = [np.zeros(1, dtype=np.int64)]
    for d in range(1, tree.p):
        vectors = smoothed_rows(counts.tables[d], cfg.alpha)
        den = agglomerate(pairwise_matrix(vectors, metric), cfg.linkage)
        k = ks[d - 1]
        if k is None:
            k = select_k(den, counts, d, cfg.alpha)
        labels.append(cut(den, k))
    return refit_pooled(counts, Staging(tree, labels), cfg.alpha)


def learn_bhc(counts: CountTable, alpha: float = 1.0) -> FittedStagedTree:
    """Greedy backward merging from the saturated staging, per depth.

    At every step the stage pair whose merge most decreases the BIC is
    merged; the depth stops when no merge decreases it. Ties prefer the
    smallest pair of stage labels.
    """
    tree = counts.tree
    log_n = math.log(counts.n)
    labels = [np.zeros(1, dtype=np.int64)]
    for d in range(1, tree.p):
        raw = kernels.bhc_labels(counts.tables[d].astype(np.float64), float(alpha), log_n)
        labels.append(canonical_labels(raw))
    return refit_pooled(counts, Staging(tree, labels), alpha)


def baseline_full(counts: CountTable, alpha: float = 1.0) -> FittedStagedTree:
    """The saturated reference model: every situation its own stage."""
    return fit_saturated(counts, alpha)
