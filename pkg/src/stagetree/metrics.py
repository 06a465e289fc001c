"""Distances and divergences between probability vectors on the simplex.

Two proper metrics (total variation, Hellinger) and four symmetric
divergences (Fisher, Jensen-Shannon, Kaniadakis, total KL). The
KL-family divergences require strictly positive inputs and raise instead
of clamping; smoothing upstream (alpha > 0) is the supported way to
guarantee positivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import NumericError, ValidationError

__all__ = [
    "Metric",
    "METRIC_NAMES",
    "resolve_metric",
    "total_variation",
    "hellinger",
    "fisher",
    "jensen_shannon",
    "kaniadakis",
    "total_kl",
    "pairwise_matrix",
]

_CODES = {
    "totalvariation": kernels.TV,
    "hellinger": kernels.HELLINGER,
    "fisher": kernels.FISHER,
    "jensenshannon": kernels.JS,
    "kaniadakis": kernels.KANIADAKIS,
    "totalkl": kernels.TOTALKL,
}
METRIC_NAMES = tuple(_CODES)
_NEEDS_POSITIVITY = ("kaniadakis", "totalkl")


@dataclass(frozen=True)
class Metric:
    """A named dissimilarity; kappa only applies to the Kaniadakis form."""

    name: str
    kappa: float = 0.5

    def __post_init__(self):
        if self.name not in _CODES:
            raise ValidationError(
                f"unknown metric {self.name!r}; choose from {', '.join(METRIC_NAMES)}"
            )
        if self.name == "kaniadakis" and not 0.0 < self.kappa < 1.0:
            raise ValidationError("kaniadakis kappa must lie in (0, 1)")

    @property
    def code(self) -> int:
        return _CODES[self.name]

    @property
    def needs_positivity(self) -> bool:
        return self.name in _NEEDS_POSITIVITY

    def __call__(self, p, q) -> float:
        if self.name == "kaniadakis":
            return kaniadakis(p, q, self.kappa)
        return _DISPATCH[self.name](p, q)


def resolve_metric(name: str, kappa: float = 0.5) -> Metric:
    return Metric(str(name).strip().lower(), kappa)


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValidationError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def _positive_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = _pair(p, q)
    if np.any(p <= 0.0) or np.any(q <= 0.0):
        raise NumericError("zero entry: this divergence needs strictly positive vectors")
    return p, q


def total_variation(p, q) -> float:
    """Half the L1 distance; in [0, 1]."""
    p, q = _pair(p, q)
    return 0.5 * float(np.abs(p - q).sum())


def hellinger(p, q) -> float:
    """sqrt(sum((sqrt(p) - sqrt(q))^2) / 2); in [0, 1]."""
    p, q = _pair(p, q)
    return math.sqrt(0.5 * float(((np.sqrt(p) - np.sqrt(q)) ** 2).sum()))


def fisher(p, q) -> float:
    """4 * arccos^2 of the Bhattacharyya coefficient.

    The coefficient is clamped to [0, 1] to guard floating-point overshoot
    when p is very close to q.
    """
    p, q = _pair(p, q)
    bc = float(np.sqrt(p * q).sum())
    bc = min(1.0, max(0.0, bc))
    return 4.0 * math.acos(bc) ** 2


def jensen_shannon(p, q) -> float:
    """Symmetrized, smoothed KL against the midpoint; in [0, ln 2].

    Finite for vectors with zero entries (0 * log 0 reads as 0).
    """
    p, q = _pair(p, q)
    mid = p + q
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.where(p > 0.0, p * np.log(2.0 * p / mid), 0.0)
        tq = np.where(q > 0.0, q * np.log(2.0 * q / mid), 0.0)
    return 0.5 * float((tp + tq).sum())


def total_kl(p, q) -> float:
    """KL(p||q) + KL(q||p) = sum((p - q) * (log p - log q)); needs positivity."""
    p, q = _positive_pair(p, q)
    return float(((p - q) * (np.log(p) - np.log(q))).sum())


def kaniadakis(p, q, kappa: float = 0.5) -> float:
    """Symmetrized divergence built on the kappa-logarithm.

    Uses log_kappa(x) = (x^kappa - x^-kappa) / (2 kappa) and the vectors
    themselves as escort weights, so the symmetrized value converges to
    total_kl as kappa -> 0.
    """
    if not 0.0 < kappa < 1.0:
        raise ValidationError("kappa must lie in (0, 1)")
    p, q = _positive_pair(p, q)
    lk = lambda x: (x**kappa - x ** (-kappa)) / (2.0 * kappa)
    return float(((lk(p) - lk(q)) * (p - q)).sum())


_DISPATCH = {
    "totalvariation": total_variation,
    "hellinger": hellinger,
    "fisher": fisher,
    "jensenshannon": jensen_shannon,
    "totalkl": total_kl,
    "kaniadakis": kaniadakis,
}


def pairwise_matrix(vectors: Sequence | np.ndarray, metric: Metric | str) -> np.ndarray:
    """Symmetric dissimilarity matrix over rows of `vectors`."""
    if isinstance(metric, str):
        metric = resolve_metric(metric)
    V = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if V.shape[0] < 1:
        raise ValidationError("need at least one vector")
    if metric.needs_positivity and np.any(V <= 0.0):
        raise NumericError(
            f"{metric.name} needs strictly positive vectors; smooth with alpha > 0"
        )
    return kernels.pairwise_dissimilarity(V, metric.code, metric.kappa)
