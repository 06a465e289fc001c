import numpy as np
import pytest

from stagetree import EventTree, FittedStagedTree, Staging, VariableSpec


@pytest.fixture
def demo_tree():
    """3-variable tree with level counts 3, 2, 3 (18 leaves)."""
    return EventTree(
        [
            VariableSpec("X1", ("a", "b", "c")),
            VariableSpec("X2", ("0", "1")),
            VariableSpec("X3", ("1", "2", "3")),
        ]
    )


@pytest.fixture
def demo_staging(demo_tree):
    """One stage at depth 1; depth 2 split {a contexts} vs {b, c contexts}."""
    return Staging(demo_tree, [[0], [0, 0, 0], [0, 0, 1, 1, 1, 1]])


@pytest.fixture
def demo_model(demo_tree, demo_staging):
    theta = [
        np.array([[0.3, 0.5, 0.2]]),
        np.array([[0.6, 0.4]]),
        np.array([[0.7, 0.2, 0.1], [0.4, 0.4, 0.2]]),
    ]
    return FittedStagedTree(demo_tree, demo_staging, theta)


# golden joint distribution of the demo model, lexicographic outcome order
DEMO_ATOMS = {
    ("a", "0", "1"): 0.1260,
    ("a", "0", "2"): 0.0360,
    ("a", "0", "3"): 0.0180,
    ("a", "1", "1"): 0.0840,
    ("a", "1", "2"): 0.0240,
    ("a", "1", "3"): 0.0120,
    ("b", "0", "1"): 0.1200,
    ("b", "0", "2"): 0.1200,
    ("b", "0", "3"): 0.0600,
    ("b", "1", "1"): 0.0800,
    ("b", "1", "2"): 0.0800,
    ("b", "1", "3"): 0.0400,
    ("c", "0", "1"): 0.0480,
    ("c", "0", "2"): 0.0480,
    ("c", "0", "3"): 0.0240,
    ("c", "1", "1"): 0.0320,
    ("c", "1", "2"): 0.0320,
    ("c", "1", "3"): 0.0160,
}


@pytest.fixture
def demo_atoms():
    return DEMO_ATOMS
