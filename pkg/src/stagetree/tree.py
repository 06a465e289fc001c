"""Event trees, stagings, and fitted staged tree models.

An event tree over p categorical variables unfolds one variable per depth:
the vertices at depth d enumerate every partial assignment of the first d
variables, in lexicographic order (first variable most significant). A
staging partitions the situations (internal vertices) of each depth into
stages; situations in one stage share the conditional distribution of the
next variable. A fitted model attaches one probability vector per stage.

Situations are addressed by (depth, lexicographic index); stage labels are
depth-local nonnegative integers, canonicalized so label 0 is the stage of
the first situation, label 1 the next new stage, and so on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "VariableSpec",
    "EventTree",
    "Staging",
    "FittedStagedTree",
    "build_event_tree",
    "saturated_staging",
    "single_stage_staging",
    "stage_partition",
    "canonical_labels",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class VariableSpec:
    """A categorical variable: a name and an ordered tuple of level labels."""

    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(str(v) for v in self.levels))
        if len(self.levels) < 2:
            raise ValidationError(
                f"variable {self.name!r} needs at least 2 levels, got {len(self.levels)}"
            )
        if len(set(self.levels)) != len(self.levels):
            raise ValidationError(f"variable {self.name!r} has duplicate levels")

    @property
    def size(self) -> int:
        return len(self.levels)

    def level_index(self, label: str) -> int:
        try:
            return self.levels.index(label)
        except ValueError:
            raise ValidationError(
                f"unknown level {label!r} for variable {self.name!r}"
            ) from None


class EventTree:
    """The tree skeleton induced by an ordered list of variables.

    Depth d has prod(sizes[:d]) situations; situation index and partial
    assignment are related by the mixed-radix expansion with the first
    variable as the most significant digit.
    """

    def __init__(self, variables: Sequence[VariableSpec]):
        variables = tuple(variables)
        if not variables:
            raise ValidationError("an event tree needs at least one variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate variable names")
        self.variables = variables
        self.sizes = tuple(v.size for v in variables)

    @property
    def p(self) -> int:
        return len(self.variables)

    @property
    def n_leaves(self) -> int:
        return math.prod(self.sizes)

    def n_situations(self, depth: int) -> int:
        self._check_depth(depth)
        return math.prod(self.sizes[:depth])

    def branching(self, depth: int) -> int:
        """Number of outgoing edges of every situation at this depth."""
        self._check_depth(depth)
        return self.sizes[depth]

    def situation_context(self, depth: int, index: int) -> tuple[int, ...]:
        """Level indices (x_1..x_depth) of the situation at (depth, index)."""
        self._check_depth(depth)
        if not 0 <= index < self.n_situations(depth):
            raise ValidationError(
                f"situation index {index} out of range at depth {depth}"
            )
        ctx = []
        for size in reversed(self.sizes[:depth]):
            index, r = divmod(index, size)
            ctx.append(r)
        return tuple(reversed(ctx))

    def context_index(self, depth: int, context: Sequence[int]) -> int:
        """Inverse of situation_context."""
        self._check_depth(depth)
        if len(context) != depth:
            raise ValidationError(f"context length {len(context)} != depth {depth}")
        idx = 0
        for x, size in zip(context, self.sizes[:depth]):
            if not 0 <= x < size:
                raise ValidationError(f"level index {x} out of range")
            idx = idx * size + x
        return idx

    def outcomes(self) -> Iterable[tuple[int, ...]]:
        """All full assignments in lexicographic order."""
        for leaf in range(self.n_leaves):
            ctx = []
            for size in reversed(self.sizes):
                leaf, r = divmod(leaf, size)
                ctx.append(r)
            yield tuple(reversed(ctx))

    def _check_depth(self, depth: int) -> None:
        if not 0 <= depth < self.p:
            raise ValidationError(f"depth {depth} out of range for p={self.p}")

    def __eq__(self, other) -> bool:
        return isinstance(other, EventTree) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self):
        spec = ", ".join(f"{v.name}({v.size})" for v in self.variables)
        return f"EventTree[{spec}]"


def build_event_tree(specs: Sequence[VariableSpec]) -> EventTree:
    return EventTree(specs)


def canonical_labels(labels: Sequence[int]) -> np.ndarray:
    """Relabel 0,1,2,... in order of first occurrence."""
    out = np.empty(len(labels), dtype=np.int64)
    seen: dict[int, int] = {}
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in seen:
            seen[lab] = len(seen)
        out[i] = seen[lab]
    return out


class Staging:
    """Per-depth partition of situations into stages.

    ``labels[d]`` holds one canonical stage label per situation at depth d,
    in lexicographic situation order. Labels are local to their depth.
    """

    def __init__(self, tree: EventTree, labels: Sequence[Sequence[int]]):
        if len(labels) != tree.p:
            raise ValidationError(
                f"staging has {len(labels)} depths, tree has {tree.p}"
            )
        canon = []
        for d, lab in enumerate(labels):
            lab = np.asarray(lab, dtype=np.int64)
            if lab.shape != (tree.n_situations(d),):
                raise ValidationError(
                    f"depth {d}: {lab.shape[0]} labels for "
                    f"{tree.n_situations(d)} situations"
                )
            lab = canonical_labels(lab)
            lab.setflags(write=False)
            canon.append(lab)
        self.tree = tree
        self.labels = tuple(canon)

    def n_stages(self, depth: int) -> int:
        return int(self.labels[depth].max()) + 1

    def total_stages(self) -> int:
        return sum(self.n_stages(d) for d in range(self.tree.p))

    def stage_of(self, depth: int, index: int) -> int:
        return int(self.labels[depth][index])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Staging)
            and self.tree == other.tree
            and all(np.array_equal(a, b) for a, b in zip(self.labels, other.labels))
        )

    def __hash__(self):
        return hash((self.tree, tuple(tuple(l) for l in self.labels)))

    def __repr__(self):
        return f"Staging({[self.n_stages(d) for d in range(self.tree.p)]} stages/depth)"


def saturated_staging(tree: EventTree) -> Staging:
    """The finest staging: every situation its own stage."""
    return Staging(tree, [np.arange(tree.n_situations(d)) for d in range(tree.p)])


def single_stage_staging(tree: EventTree) -> Staging:
    """The coarsest staging: one stage per depth."""
    return Staging(tree, [np.zeros(tree.n_situations(d), dtype=np.int64) for d in range(tree.p)])


def stage_partition(staging: Staging, depth: int) -> list[list[int]]:
    """Blocks of situation indices sharing a stage, ordered by first member."""
    labels = staging.labels[depth]
    blocks: list[list[int]] = [[] for _ in range(staging.n_stages(depth))]
    for i, lab in enumerate(labels):
        blocks[lab].append(i)
    return blocks


class FittedStagedTree:
    """A staging plus one conditional probability vector per stage.

    ``theta[d]`` is an array of shape (n_stages at depth d, branching(d)).
    ``n`` records the sample size used for fitting (0 for synthetic models)
    and ``alpha`` the smoothing constant.
    """

    def __init__(
        self,
        tree: EventTree,
        staging: Staging,
        theta: Sequence[np.ndarray],
        n: int = 0,
        alpha: float = 0.0,
    ):
        if staging.tree != tree:
            raise ValidationError("staging belongs to a different tree")
        if len(theta) != tree.p:
            raise ValidationError(f"theta has {len(theta)} depths, tree has {tree.p}")
        mats = []
        for d, t in enumerate(theta):
            t = np.asarray(t, dtype=np.float64)
            expect = (staging.n_stages(d), tree.branching(d))
            if t.shape != expect:
                raise ValidationError(f"theta[{d}] has shape {t.shape}, expected {expect}")
            if np.any(t < 0) or np.any(t > 1):
                raise ValidationError(f"theta[{d}] entries outside [0, 1]")
            if np.max(np.abs(t.sum(axis=1) - 1.0)) > 1e-12:
                raise ValidationError(f"theta[{d}] rows do not sum to 1")
            t.setflags(write=False)
            mats.append(t)
        self.tree = tree
        self.staging = staging
        self.theta = tuple(mats)
        self.n = int(n)
        self.alpha = float(alpha)

    def theta_for(self, depth: int, situation: int) -> np.ndarray:
        return self.theta[depth][self.staging.stage_of(depth, situation)]

    def path_probability(self, outcome: Sequence[int]) -> float:
        """Product of the stage transition probabilities along the path."""
        if len(outcome) != self.tree.p:
            raise ValidationError("outcome length does not match tree")
        prob = 1.0
        idx = 0
        for d, x in enumerate(outcome):
            size = self.tree.sizes[d]
            if not 0 <= x < size:
                raise ValidationError(f"level index {x} out of range at depth {d}")
            prob *= self.theta_for(d, idx)[x]
            idx = idx * size + x
        return prob

    def log_path_probability(self, outcome: Sequence[int]) -> float:
        prob = self.path_probability(outcome)
        if prob == 0.0:
            return -math.inf
        return math.log(prob)

    def atom_probabilities(self) -> np.ndarray:
        """Joint probabilities of all leaves, in lexicographic outcome order."""
        probs = np.ones(1)
        for d in range(self.tree.p):
            rows = self.theta[d][self.staging.labels[d]]  # situation-wise vectors
            probs = (probs[:, None] * rows).ravel()
        return probs


# --- model JSON schema -------------------------------------------------------
#
# {"variables": [{"name":..., "levels":[...]}, ...],
#  "staging":   [[labels per depth]],
#  "theta":     [{"<label>": [probs], ...} per depth],
#  "n":         int,
#  "alpha":     float}


def model_to_dict(model: FittedStagedTree) -> dict:
    return {
        "variables": [
            {"name": v.name, "levels": list(v.levels)} for v in model.tree.variables
        ],
        "staging": [[int(x) for x in lab] for lab in model.staging.labels],
        "theta": [
            {str(lab): [float(x) for x in model.theta[d][lab]] for lab in range(model.staging.n_stages(d))}
            for d in range(model.tree.p)
        ],
        "n": model.n,
        "alpha": model.alpha,
    }


def model_from_dict(doc: dict) -> FittedStagedTree:
    try:
        tree = EventTree(
            [VariableSpec(v["name"], tuple(v["levels"])) for v in doc["variables"]]
        )
        staging = Staging(tree, doc["staging"])
        theta = []
        for d in range(tree.p):
            block = doc["theta"][d]
            theta.append(
                np.array([block[str(lab)] for lab in range(staging.n_stages(d))])
            )
        return FittedStagedTree(tree, staging, theta, n=doc.get("n", 0), alpha=doc.get("alpha", 0.0))
    except (KeyError, IndexError, TypeError) as exc:
        raise ValidationError(f"malformed model document: {exc}") from exc


def save_model(model: FittedStagedTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> FittedStagedTree:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
