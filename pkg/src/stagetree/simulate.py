"""Random staged tree models and forward sampling.

All randomness flows through numpy Generators (PCG64); every operation
takes an explicit generator, and `replication_rng` derives independent
streams from a master seed so grid replications are reproducible and can
run concurrently.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .data import Dataset
from .errors import ValidationError
from .tree import EventTree, FittedStagedTree, Staging, canonical_labels

__all__ = [
    "replication_rng",
    "random_staging_join",
    "random_staging_split",
    "random_parameters",
    "sample",
]


def replication_rng(master_seed: int, *indices: int) -> np.random.Generator:
    """Independent PCG64 stream for one unit of work under a master seed."""
    return np.random.default_rng([int(master_seed), *map(int, indices)])


def random_staging_join(tree: EventTree, q: float, rng: np.random.Generator) -> Staging:
    """Sequentially join situations into stages with probability q.

    Per depth, the first situation opens a stage; each later situation
    joins a uniformly chosen existing stage with probability q, otherwise
    opens a new one. q -> 0 gives the saturated staging, q = 1 a single
    stage per depth.
    """
    if not 0.0 < q <= 1.0:
        raise ValidationError("q must lie in (0, 1]")
    labels = []
    for d in range(tree.p):
        m = tree.n_situations(d)
        lab = np.zeros(m, dtype=np.int64)
        n_stages = 1
        for i in range(1, m):
            if rng.random() < q:
                lab[i] = rng.integers(0, n_stages)
            else:
                lab[i] = n_stages
                n_stages += 1
        labels.append(lab)
    return Staging(tree, labels)


def random_staging_split(tree: EventTree, k0: int, rng: np.random.Generator) -> Staging:
    """Split each depth's situations into exactly k0 stages, uniformly.

    Depths with at most k0 situations keep every situation in its own
    stage; elsewhere labels are resampled until all k0 stages are
    nonempty.
    """
    if k0 < 1:
        raise ValidationError("k0 must be at least 1")
    labels = []
    for d in range(tree.p):
        m = tree.n_situations(d)
        if m <= k0:
            labels.append(np.arange(m, dtype=np.int64))
            continue
        while True:
            lab = rng.integers(0, k0, size=m)
            if np.unique(lab).size == k0:
                break
        labels.append(canonical_labels(lab))
    return Staging(tree, labels)


def random_parameters(
    tree: EventTree, staging: Staging, rng: np.random.Generator
) -> FittedStagedTree:
    """Draw each stage's vector uniformly from the open simplex (flat Dirichlet)."""
    theta = []
    for d in range(tree.p):
        s = tree.branching(d)
        block = np.empty((staging.n_stages(d), s))
        for lab in range(block.shape[0]):
            vec = rng.dirichlet(np.ones(s))
            while np.any(vec <= 0.0):  # guard against underflow at the boundary
                vec = rng.dirichlet(np.ones(s))
            block[lab] = vec
        theta.append(block)
    return FittedStagedTree(tree, staging, theta, n=0, alpha=0.0)


def sample(model: FittedStagedTree, n: int, rng: np.random.Generator) -> Dataset:
    """Forward-sample n independent root-to-leaf paths."""
    if n < 1:
        raise ValidationError("need at least one sample")
    tree = model.tree
    u = rng.random((n, tree.p))
    rows = np.empty((n, tree.p), dtype=np.int64)
    situation = np.zeros(n, dtype=np.int64)
    for d in range(tree.p):
        cum = np.cumsum(model.theta[d], axis=1)
        stage = model.staging.labels[d][situation]
        # inverse CDF: count thresholds strictly below the uniform draw
        rows[:, d] = (u[:, d : d + 1] >= cum[stage][:, :-1]).sum(axis=1)
        situation = situation * tree.branching(d) + rows[:, d]
    return Dataset(tree.variables, rows)
