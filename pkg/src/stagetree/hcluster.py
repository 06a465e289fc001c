"""Agglomerative clustering over a precomputed dissimilarity matrix.

Four linkages: average, complete, mcquitty (WPGMA), ward.D2. Inter-cluster
dissimilarities are maintained with the Lance-Williams recurrences;
ward.D2 squares the input dissimilarities internally and reports
square-rooted merge heights. Ties are broken toward the smallest pair of
current cluster ids, so dendrograms are reproducible bit for bit.

Cluster ids follow the usual convention: originals are 0..n-1 and the
cluster created by merge step t gets id n + t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError

__all__ = ["Dendrogram", "LINKAGE_NAMES", "resolve_linkage", "agglomerate", "cut"]

_CODES = {
    "average": kernels.AVERAGE,
    "complete": kernels.COMPLETE,
    "mcquitty": kernels.MCQUITTY,
    "ward.d2": kernels.WARD_D2,
}
LINKAGE_NAMES = ("average", "complete", "mcquitty", "ward.D2")


def resolve_linkage(name: str) -> int:
    key = str(name).strip().lower()
    if key not in _CODES:
        raise ValidationError(
            f"unknown linkage {name!r}; choose from {', '.join(LINKAGE_NAMES)}"
        )
    return _CODES[key]


@dataclass(frozen=True)
class Dendrogram:
    """Merge history: rows of (left id, right id, height, merged size)."""

    n_items: int
    merges: np.ndarray  # (n_items - 1, 4) float64

    def merge_tuples(self) -> list[tuple[int, int, float, int]]:
        return [(int(a), int(b), float(h), int(s)) for a, b, h, s in self.merges]


def agglomerate(matrix, linkage: str) -> Dendrogram:
    """Cluster a symmetric dissimilarity matrix bottom-up."""
    code = resolve_linkage(linkage)
    D = np.asarray(matrix, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] < 1:
        raise ValidationError("dissimilarity matrix must be square and nonempty")
    if not np.all(np.isfinite(D)):
        raise ValidationError("dissimilarity matrix has non-finite entries")
    if np.max(np.abs(D - D.T)) > 1e-12:
        raise ValidationError("dissimilarity matrix is not symmetric")
    n = D.shape[0]
    if n == 1:
        return Dendrogram(1, np.zeros((0, 4)))
    work = D.copy()
    np.fill_diagonal(work, 0.0)
    return Dendrogram(n, kernels.linkage_merge(work, code))


def cut(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Labels after undoing the last k-1 merges; canonical first-member order."""
    n = dendrogram.n_items
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} out of range 1..{n}")
    pairs = dendrogram.merges[:, :2].astype(np.int64)
    return kernels.cut_labels(pairs, n, k)
