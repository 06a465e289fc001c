"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/benchmark_backends.py

Both implementations are imported side by side, so this script works no
matter which backend is active. The learner-level rows at the end time
full fits in subprocesses with STAGETREE_NUMBA=1/0.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

from stagetree import kernels

if not kernels.NUMBA_AVAILABLE:
    sys.exit("numba backend unavailable; nothing to compare")

NUMBA = kernels.NUMBA_IMPL
NUMPY = kernels.NUMPY_IMPL


def timeit(func, *args, repeat=20):
    func(*args)  # warm (and JIT-compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def simplex_rows(rng, n, s):
    V = rng.dirichlet(np.ones(s), size=n)
    V = np.clip(V, 1e-9, None)
    return V / V.sum(axis=1, keepdims=True)


def sym_matrix(rng, n):
    base = rng.random((n, n))
    D = (base + base.T) / 2
    np.fill_diagonal(D, 0.0)
    return D


def row(label, t_nb, t_np):
    print(f"{label:<42} {t_nb * 1e3:>10.3f} {t_np * 1e3:>10.3f} {t_np / t_nb:>9.1f}x")


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':<42} {'numba ms':>10} {'numpy ms':>10} {'speedup':>10}")
    print("-" * 76)

    codes = rng.integers(0, 256, size=100_000)
    values = rng.integers(0, 2, size=100_000)
    row(
        "count_pairs (100k rows, 256x2)",
        timeit(NUMBA["count_pairs"], codes, values, 256, 2),
        timeit(NUMPY["count_pairs"], codes, values, 256, 2),
    )

    for n, s in ((128, 2), (512, 4)):
        V = simplex_rows(rng, n, s)
        for code, name in ((kernels.TV, "totalvariation"), (kernels.TOTALKL, "totalkl")):
            row(
                f"pairwise {name} ({n}x{s})",
                timeit(NUMBA["pairwise_dissimilarity"], V, code, 0.5),
                timeit(NUMPY["pairwise_dissimilarity"], V, code, 0.5),
            )

    for n in (64, 256, 512):
        D = sym_matrix(rng, n)
        row(
            f"linkage_merge ward.D2 (n={n})",
            timeit(NUMBA["linkage_merge"], D, kernels.WARD_D2),
            timeit(NUMPY["linkage_merge"], D, kernels.WARD_D2),
        )

    D = sym_matrix(rng, 256)
    pairs = NUMPY["linkage_merge"](D, kernels.AVERAGE)[:, :2].astype(np.int64)
    row(
        "cut_labels (n=256, k=2)",
        timeit(NUMBA["cut_labels"], pairs, 256, 2),
        timeit(NUMPY["cut_labels"], pairs, 256, 2),
    )
    rows256 = rng.integers(0, 8, size=(256, 2)).astype(np.float64)
    row(
        "merge_ll_deltas (256x2)",
        timeit(NUMBA["merge_ll_deltas"], rows256, pairs, 1.0),
        timeit(NUMPY["merge_ll_deltas"], rows256, pairs, 1.0),
    )

    for m in (64, 256):
        counts = rng.integers(0, 10, size=(m, 2)).astype(np.float64)
        row(
            f"bhc_labels ({m}x2, log n=6.2)",
            timeit(NUMBA["bhc_labels"], counts.copy(), 1.0, 6.2, repeat=5),
            timeit(NUMPY["bhc_labels"], counts.copy(), 1.0, 6.2, repeat=5),
        )

    print("-" * 76)
    print("full learner fits (p=9 binary, N=512, median of 5):")
    script = (
        "import json, time, numpy as np\n"
        "import stagetree as st\n"
        "from stagetree.experiment import binary_tree\n"
        "tree = binary_tree(9)\n"
        "cfg = st.LearnConfig(k='auto')\n"
        "rng = st.replication_rng(1, 999)\n"
        "truth = st.random_parameters(tree, st.random_staging_join(tree, 0.9, rng), rng)\n"
        "counts = st.count_transitions(st.sample(truth, 512, rng), tree)\n"
        "st.learn_hclust(counts, cfg); st.learn_bhc(counts)\n"
        "t_hc, t_bhc = [], []\n"
        "for _ in range(5):\n"
        "    t0 = time.perf_counter(); st.learn_hclust(counts, cfg); t_hc.append(time.perf_counter() - t0)\n"
        "    t0 = time.perf_counter(); st.learn_bhc(counts); t_bhc.append(time.perf_counter() - t0)\n"
        "print(json.dumps({'backend': st.ACTIVE_BACKEND, 'hclust': float(np.median(t_hc)), 'bhc': float(np.median(t_bhc))}))\n"
    )
    for flag in ("1", "0"):
        env = dict(os.environ, STAGETREE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env, check=True
        )
        rec = json.loads(out.stdout)
        print(
            f"  {rec['backend']:<8} hclust {rec['hclust'] * 1e3:8.2f} ms   "
            f"bhc {rec['bhc'] * 1e3:8.2f} ms"
        )


if __name__ == "__main__":
    main()
