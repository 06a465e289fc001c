"""Acceptance suite: one test per release criterion.

Every test enforces its stated tolerance and wall-clock budget and prints
a single summary line, so `pytest -v -s tests/test_acceptance.py` doubles
as the acceptance report.
"""

import math
import time
from itertools import permutations

import numpy as np
import pytest

from stagetree import (
    LearnConfig,
    Staging,
    VariableSpec,
    agglomerate,
    baseline_full,
    build_event_tree,
    count_transitions,
    cut,
    fisher,
    hamming_distance,
    hellinger,
    jensen_shannon,
    kaniadakis,
    learn_bhc,
    learn_hclust,
    median_aggregate,
    relative_bic,
    sample,
    score_bic,
    total_kl,
    total_variation,
)
from stagetree.classify import evaluate as classify_evaluate
from stagetree.classify import predict_batch, train as classify_train
from stagetree.experiment import binary_tree, study_grid, run_classification, run_grid
from stagetree.simulate import (
    random_parameters,
    random_staging_join,
    random_staging_split,
    replication_rng,
)

from test_evaluate import exhaustive_hamming, random_staging
from test_hcluster import labels_to_blocks, naive_agglomerate_cuts, random_symmetric


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[{status}] {self.name} ({elapsed:.2f}s / budget {self.seconds:.0f}s)")
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} exceeded {self.seconds}s"


def random_simplex(rng, dim):
    v = rng.dirichlet(np.ones(dim))
    while np.any(v <= 1e-12):
        v = rng.dirichlet(np.ones(dim))
    return v


def test_joint_distribution_goldens(demo_model, demo_tree, demo_atoms):
    with Budget("table-golden: 18 atoms exact to 1e-12", 1.0):
        probs = demo_model.atom_probabilities()
        assert probs.shape == (18,)
        for leaf, outcome in enumerate(demo_tree.outcomes()):
            labels = tuple(v.levels[x] for v, x in zip(demo_tree.variables, outcome))
            assert abs(probs[leaf] - demo_atoms[labels]) <= 1e-12, labels
        assert abs(probs.sum() - 1.0) <= 1e-10


def test_metric_axiom_suite():
    metrics = {
        "totalvariation": total_variation,
        "hellinger": hellinger,
        "fisher": fisher,
        "jensenshannon": jensen_shannon,
        "kaniadakis": kaniadakis,
        "totalkl": total_kl,
    }
    with Budget("metric-axioms: 1000 pairs x dims 2-6, triangle x 1000", 10.0):
        rng = np.random.default_rng(202)
        ln2 = math.log(2)
        for dim in range(2, 7):
            for _ in range(1000):
                p, q = random_simplex(rng, dim), random_simplex(rng, dim)
                for name, func in metrics.items():
                    d = func(p, q)
                    assert d >= 0.0, name
                    assert d == func(q, p), name
                    assert func(p, p) < 1e-12, name
                    assert d >= 1e-12, (name, "distinct pair collapsed")
                assert total_variation(p, q) <= 1.0
                assert hellinger(p, q) <= 1.0
                assert jensen_shannon(p, q) <= ln2 + 1e-15
        for _ in range(1000):
            dim = int(rng.integers(2, 7))
            p, q, r = (random_simplex(rng, dim) for _ in range(3))
            assert total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-12
            assert hellinger(p, r) <= hellinger(p, q) + hellinger(q, r) + 1e-12


def test_cross_metric_identities():
    with Budget("cross-metric: hellinger/fisher identity, kaniadakis limit", 10.0):
        rng = np.random.default_rng(203)
        for _ in range(1000):
            dim = int(rng.integers(2, 7))
            p, q = random_simplex(rng, dim), random_simplex(rng, dim)
            lhs = hellinger(p, q) ** 2
            rhs = 1.0 - math.cos(math.sqrt(fisher(p, q)) / 2.0)
            assert abs(lhs - rhs) <= 1e-10
            assert abs(kaniadakis(p, q, kappa=1e-3) - total_kl(p, q)) <= 1e-2


def test_clustering_against_naive_oracle():
    with Budget("clustering-oracle: 200 seeds, n<=7, all cuts", 30.0):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 8))
            # continuous entries: average-linkage means are summed in a
            # different order than the recurrence, so only tie-free inputs
            # compare meaningfully against the textbook oracle
            D = random_symmetric(rng, n)
            for linkage in ("complete", "average"):
                den = agglomerate(D, linkage)
                oracle = naive_agglomerate_cuts(D, linkage)
                for k in range(1, n + 1):
                    assert labels_to_blocks(cut(den, k)) == sorted(oracle[k]), (
                        seed,
                        linkage,
                        k,
                    )


def test_hamming_against_exhaustive_oracle():
    with Budget("hamming-oracle: 500 staging pairs vs exhaustive bijections", 30.0):
        trees = [
            build_event_tree(
                [VariableSpec("X1", tuple("abcdef")[:w]), VariableSpec("X2", ("0", "1"))]
            )
            for w in (2, 3, 4, 5, 6)
        ]
        rng = np.random.default_rng(204)
        for trial in range(500):
            tree = trees[trial % len(trees)]
            a, b = random_staging(tree, rng, max_stages=4), random_staging(tree, rng, max_stages=4)
            assert hamming_distance(a, b) == exhaustive_hamming(a, b), trial


def test_structure_recovery():
    with Budget("structure-recovery: p=5 split, N=2^13, 20 reps, median HD<=2", 60.0):
        tree = binary_tree(5)
        cfg = LearnConfig(metric="totalvariation", linkage="ward.D2", k=2)
        hds = []
        for rep in range(20):
            rng = replication_rng(0, rep)
            truth_staging = random_staging_split(tree, 2, rng)
            truth = random_parameters(tree, truth_staging, rng)
            counts = count_transitions(sample(truth, 2**13, rng), tree)
            model = learn_hclust(counts, cfg)
            hds.append(hamming_distance(model.staging, truth_staging))
        median_hd = median_aggregate(hds)
        print(f"  structure recovery HDs: {sorted(hds)} -> median {median_hd}")
        assert median_hd <= 2.0


def test_bhc_parity():
    with Budget("bhc-parity: p=5 join q=.9, N=2^11, 20 reps", 60.0):
        tree = binary_tree(5)
        cfg = LearnConfig(metric="totalvariation", linkage="ward.D2", k="auto")
        deltas, bics, sat_bics = [], [], []
        for rep in range(20):
            rng = replication_rng(0, rep)
            truth_staging = random_staging_join(tree, 0.9, rng)
            truth = random_parameters(tree, truth_staging, rng)
            counts = count_transitions(sample(truth, 2**11, rng), tree)
            hc_score = score_bic(learn_hclust(counts, cfg), counts)
            bhc_score = score_bic(learn_bhc(counts), counts)
            sat_score = score_bic(baseline_full(counts), counts)
            deltas.append(relative_bic(hc_score, bhc_score))
            bics.append(hc_score.bic)
            sat_bics.append(sat_score.bic)
        med_delta = median_aggregate(deltas)
        print(f"  median dBIC vs BHC: {med_delta:.5f}")
        assert med_delta <= 0.05
        assert median_aggregate(bics) < median_aggregate(sat_bics)


def test_runtime_scaling():
    with Budget("runtime-scaling: p=9, N=512, hclust <= BHC/10 and < 1s", 120.0):
        tree = binary_tree(9)
        cfg = LearnConfig(metric="totalvariation", linkage="ward.D2", k="auto")
        # warm both learners so one-time compilation stays out of the timings
        rng = replication_rng(1, 999)
        warm_truth = random_parameters(tree, random_staging_join(tree, 0.9, rng), rng)
        warm_counts = count_transitions(sample(warm_truth, 512, rng), tree)
        learn_hclust(warm_counts, cfg)
        learn_bhc(warm_counts)
        t_hc, t_bhc = [], []
        for rep in range(10):
            rng = replication_rng(1, rep)
            truth = random_parameters(tree, random_staging_join(tree, 0.9, rng), rng)
            counts = count_transitions(sample(truth, 512, rng), tree)
            t0 = time.perf_counter()
            learn_hclust(counts, cfg)
            t_hc.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            learn_bhc(counts)
            t_bhc.append(time.perf_counter() - t0)
        hc_med, bhc_med = median_aggregate(t_hc), median_aggregate(t_bhc)
        print(f"  hclust {hc_med * 1e3:.1f} ms vs bhc {bhc_med * 1e3:.1f} ms "
              f"({bhc_med / hc_med:.1f}x)")
        assert hc_med <= bhc_med / 10.0
        assert max(t_hc) < 1.0


def test_classifier_sanity():
    with Budget("classifier: within 2pp of the enumerated optimum", 60.0):
        rng = replication_rng(46)
        tree = build_event_tree(
            [VariableSpec("class", ("neg", "pos"))]
            + [VariableSpec(f"f{i}", ("0", "1")) for i in range(4)]
        )
        staging = random_staging_split(tree, 2, rng)
        while True:
            truth = random_parameters(tree, staging, rng)
            gaps = [
                0.5 * np.abs(b[i] - b[j]).sum()
                for b in truth.theta
                for i in range(b.shape[0])
                for j in range(i + 1, b.shape[0])
            ]
            if not gaps or min(gaps) >= 0.25:
                break
        train_set = sample(truth, 2**13, rng)
        test_set = sample(truth, 2**11, rng)
        clf = classify_train(train_set, "class", LearnConfig(k=2))
        _, posterior = predict_batch(clf, test_set.rows[:, 1:])
        assert np.abs(posterior.sum(axis=1) - 1.0).max() <= 1e-12
        scores = classify_evaluate(clf, test_set)
        atoms = truth.atom_probabilities().reshape(2, -1)
        optimum = atoms.max(axis=0).sum()
        print(f"  accuracy {scores.accuracy:.4f} vs enumerated optimum {optimum:.4f}")
        assert abs(scores.accuracy - optimum) < 0.02
        # protocol harness: 10 x 80/20 splits with medians
        rows, summary = run_classification(
            [("sanity", train_set)], "class",
            [LearnConfig(metric="totalvariation", linkage="ward.D2", k=2)],
            splits=10, ratio=0.8, seed=3,
        )
        assert len(rows) == 10 and len(summary) == 1
        assert abs(summary[0]["accuracy"] - optimum) < 0.05
        assert 0.0 <= summary[0]["f1"] <= 1.0


def test_grid_accounting():
    with Budget("grid-accounting: full-layout R=1 dry run", 300.0):
        spec = study_grid(replications=1, seed=0)
        rows, medians = run_grid(spec)
        per_dataset = {}
        for row in rows:
            key = (row["p"], row["gen_method"], row["q"], row["k0"], row["N"])
            per_dataset.setdefault(key, []).append(row)
        assert len(per_dataset) == 48
        for key, members in per_dataset.items():
            p = key[0]
            learners = [r for r in members if r["linkage"]]
            baselines = sorted(r["metric"] for r in members if not r["linkage"])
            assert len(learners) == 48, key
            if p <= 7:
                assert baselines == ["bhc", "full"], key
            else:
                assert baselines == ["full"], key
        assert not any(
            math.isnan(r["bic"]) for r in rows if r["linkage"]
        ), "learner fits failed inside the grid"
