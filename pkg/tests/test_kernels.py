"""Cross-backend equivalence: every kernel's numba and numpy paths agree."""

import subprocess
import sys

import numpy as np
import pytest

from stagetree import kernels

pytestmark = pytest.mark.skipif(
    not kernels.NUMBA_AVAILABLE, reason="numba backend not active"
)


def random_simplex_rows(rng, n, s):
    V = rng.dirichlet(np.ones(s), size=n)
    V = np.clip(V, 1e-9, None)
    return V / V.sum(axis=1, keepdims=True)


def test_count_pairs_equivalence():
    rng = np.random.default_rng(1)
    codes = rng.integers(0, 20, size=1000)
    values = rng.integers(0, 3, size=1000)
    a = kernels.NUMBA_IMPL["count_pairs"](codes, values, 20, 3)
    b = kernels.NUMPY_IMPL["count_pairs"](codes, values, 20, 3)
    assert np.array_equal(a, b)


def test_pairwise_equivalence():
    rng = np.random.default_rng(2)
    for code in range(6):
        for n, s in ((1, 2), (7, 3), (40, 5)):
            V = random_simplex_rows(rng, n, s)
            a = kernels.NUMBA_IMPL["pairwise_dissimilarity"](V, code, 0.5)
            b = kernels.NUMPY_IMPL["pairwise_dissimilarity"](V, code, 0.5)
            assert np.allclose(a, b, atol=1e-12), code
            assert np.array_equal(a, a.T)
            assert np.all(np.diag(a) == 0.0)


def test_linkage_equivalence():
    rng = np.random.default_rng(3)
    for trial in range(40):
        n = int(rng.integers(1, 50))
        base = rng.integers(0, 5, size=(n, n)) if trial % 2 else rng.random((n, n))
        D = (base + base.T).astype(float) / 2.0
        np.fill_diagonal(D, 0.0)
        for code in range(4):
            a = kernels.NUMBA_IMPL["linkage_merge"](D.copy(), code)
            b = kernels.NUMPY_IMPL["linkage_merge"](D.copy(), code)
            assert np.allclose(a, b, atol=1e-12), (trial, code)


def test_merge_ll_deltas_equivalence():
    rng = np.random.default_rng(4)
    rows = rng.integers(0, 30, size=(12, 3)).astype(np.float64)
    base = rng.random((12, 12))
    D = (base + base.T) / 2
    np.fill_diagonal(D, 0.0)
    pairs = kernels.NUMPY_IMPL["linkage_merge"](D, 0)[:, :2].astype(np.int64)
    for alpha in (0.5, 1.0):
        a = kernels.NUMBA_IMPL["merge_ll_deltas"](rows, pairs, alpha)
        b = kernels.NUMPY_IMPL["merge_ll_deltas"](rows, pairs, alpha)
        assert np.allclose(a, b, atol=1e-10)


def test_bhc_equivalence():
    rng = np.random.default_rng(5)
    for trial in range(25):
        m = int(rng.integers(1, 33))
        counts = rng.integers(0, 12, size=(m, 2)).astype(np.float64)
        for alpha in (0.5, 1.0):
            a = kernels.NUMBA_IMPL["bhc_labels"](counts.copy(), alpha, np.log(100.0))
            b = kernels.NUMPY_IMPL["bhc_labels"](counts.copy(), alpha, np.log(100.0))
            assert np.array_equal(a, b), trial


def test_env_flag_forces_numpy_backend():
    code = (
        "import stagetree.kernels as k; "
        "assert k.ACTIVE_BACKEND == 'numpy', k.ACTIVE_BACKEND; "
        "assert k.pairwise_dissimilarity is k.NUMPY_IMPL['pairwise_dissimilarity']"
    )
    subprocess.run(
        [sys.executable, "-c", code],
        check=True,
        env={"STAGETREE_NUMBA": "0", "PATH": "/usr/bin:/bin"},
        cwd="/root/pkg/src",
    )


def test_learner_results_identical_across_backends():
    # end to end: a fit under the numpy backend matches the numba backend
    script = """
import json
import numpy as np
import stagetree as st
from stagetree.experiment import binary_tree
tree = binary_tree(5)
rng = st.replication_rng(123)
truth = st.random_parameters(tree, st.random_staging_split(tree, 2, rng), rng)
counts = st.count_transitions(st.sample(truth, 1024, rng), tree)
model = st.learn_hclust(counts, st.LearnConfig(k="auto"))
bhc = st.learn_bhc(counts)
print(json.dumps({
    "backend": st.ACTIVE_BACKEND,
    "staging": [l.tolist() for l in model.staging.labels],
    "bhc": [l.tolist() for l in bhc.staging.labels],
    "bic": st.score_bic(model, counts).bic,
}))
"""
    import os

    outputs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, STAGETREE_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", script], check=True, capture_output=True,
            text=True, env=env, cwd="/root/pkg",
        )
        outputs[flag] = proc.stdout
    import json

    a, b = json.loads(outputs["1"]), json.loads(outputs["0"])
    assert a["backend"] == "numba" and b["backend"] == "numpy"
    assert a["staging"] == b["staging"]
    assert a["bhc"] == b["bhc"]
    assert abs(a["bic"] - b["bic"]) < 1e-9
