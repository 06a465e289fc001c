"""Naive staged event tree classifier.

The class variable becomes the tree's first variable, features follow in
their dataset order, and the staging over feature depths is learned with
the clustering learner. Prediction maximizes the root-to-leaf path
probability of (class, features) over the class levels; the computation
runs in log domain to stay stable at many features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, count_transitions
from .errors import ValidationError
from .learn import LearnConfig, learn_hclust
from .tree import EventTree, FittedStagedTree, VariableSpec

__all__ = ["ClassifierModel", "EvalScores", "train", "predict", "predict_batch", "evaluate"]


@dataclass(frozen=True)
class ClassifierModel:
    class_var: VariableSpec
    feature_vars: tuple[VariableSpec, ...]
    model: FittedStagedTree


@dataclass(frozen=True)
class EvalScores:
    accuracy: float
    f1: float
    confusion: np.ndarray  # [true class, predicted class]


def train(data: Dataset, class_name: str, cfg: LearnConfig | None = None) -> ClassifierModel:
    """Fit a class-first staged tree on the training data."""
    cfg = cfg or LearnConfig()
    class_col = data.column(class_name)
    order = [class_col] + [j for j in range(data.p) if j != class_col]
    reordered = data.reorder(order)
    tree = EventTree(reordered.schema)
    fitted = learn_hclust(count_transitions(reordered, tree), cfg)
    return ClassifierModel(reordered.schema[0], reordered.schema[1:], fitted)


def _log_theta(model: FittedStagedTree) -> list[np.ndarray]:
    out = []
    for block in model.theta:
        with np.errstate(divide="ignore"):
            out.append(np.log(block))
    return out


def predict_batch(classifier: ClassifierModel, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Predicted class index and posterior row for each feature row."""
    model = classifier.model
    tree = model.tree
    n_class = tree.branching(0)
    features = np.asarray(features, dtype=np.int64)
    if features.ndim == 1:
        features = features[None, :]
    if features.shape[1] != tree.p - 1:
        raise ValidationError(
            f"expected {tree.p - 1} features, got {features.shape[1]}"
        )
    for j, var in enumerate(classifier.feature_vars):
        col = features[:, j]
        if col.min() < 0 or col.max() >= var.size:
            raise ValidationError(f"feature {var.name!r} has out-of-range level")
    log_theta = _log_theta(model)
    n = features.shape[0]
    # one candidate path per class level, walked jointly over all rows
    logpost = np.tile(log_theta[0][0], (n, 1))  # root stage: class prior
    situation = np.tile(np.arange(n_class, dtype=np.int64), (n, 1))
    for d in range(1, tree.p):
        x = features[:, d - 1]
        stage = model.staging.labels[d][situation]
        logpost += log_theta[d][stage, x[:, None]]
        situation = situation * tree.branching(d) + x[:, None]
    shifted = logpost - logpost.max(axis=1, keepdims=True)
    post = np.exp(shifted)
    post /= post.sum(axis=1, keepdims=True)
    return np.argmax(post, axis=1), post


def predict(classifier: ClassifierModel, features) -> tuple[int, np.ndarray]:
    """Single-row convenience wrapper; ties resolve to the lowest class index."""
    pred, post = predict_batch(classifier, np.asarray(features, dtype=np.int64)[None, :])
    return int(pred[0]), post[0]


def evaluate(classifier: ClassifierModel, test: Dataset) -> EvalScores:
    """Accuracy, macro-averaged F1, and the confusion matrix on held-out rows."""
    expect = (classifier.class_var, *classifier.feature_vars)
    if tuple(test.schema) != expect:
        # accept the training column order too
        names = [v.name for v in test.schema]
        if classifier.class_var.name not in names:
            raise ValidationError("test set lacks the class column")
        order = [names.index(classifier.class_var.name)] + [
            j for j, v in enumerate(test.schema) if v.name != classifier.class_var.name
        ]
        test = test.reorder(order)
        if tuple(test.schema) != expect:
            raise ValidationError("test schema does not match the classifier")
    truth = test.rows[:, 0]
    pred, _ = predict_batch(classifier, test.rows[:, 1:])
    n_class = classifier.class_var.size
    confusion = np.zeros((n_class, n_class), dtype=np.int64)
    np.add.at(confusion, (truth, pred), 1)
    accuracy = float(np.trace(confusion) / confusion.sum())
    f1s = np.zeros(n_class)
    for c in range(n_class):
        tp = confusion[c, c]
        fp = confusion[:, c].sum() - tp
        fn = confusion[c, :].sum() - tp
        if 2 * tp + fp + fn > 0:
            f1s[c] = 2 * tp / (2 * tp + fp + fn)
    return EvalScores(accuracy, float(f1s.mean()), confusion)
