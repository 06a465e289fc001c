"""Simulation grid and classification benchmark runners.

A grid cell is (p, generation method, sample size); each replication
generates a true model and dataset, fits every learner configuration plus
the reference models, and emits one CSV row per fit. Wall time covers the
learner call only; transition counts are precomputed. Replications run on
independent PCG64 streams, so results are identical whether the grid runs
sequentially or across processes.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

logger = logging.getLogger("stagetree.experiment")

from .classify import evaluate as classify_evaluate
from .classify import train as classify_train
from .data import Dataset, count_transitions
from .errors import StagetreeError, ValidationError
from .estimation import score_bic
from .evaluate import hamming_distance, median_aggregate, relative_bic, relative_hd
from .hcluster import LINKAGE_NAMES
from .learn import LearnConfig, baseline_full, learn_bhc, learn_hclust
from .metrics import METRIC_NAMES
from .simulate import (
    random_parameters,
    random_staging_join,
    random_staging_split,
    replication_rng,
    sample,
)
from .tree import EventTree, VariableSpec

__all__ = [
    "GenMethod",
    "GridSpec",
    "study_grid",
    "run_grid",
    "run_classification",
    "summarize_medians",
    "write_rows",
    "read_rows",
    "RESULT_COLUMNS",
    "MEDIAN_COLUMNS",
    "SCORE_COLUMNS",
]

RESULT_COLUMNS = [
    "p", "gen_method", "q", "k0", "N", "rep",
    "metric", "linkage", "kspec",
    "bic", "hd_truth",
    "delta_bic_vs_full", "delta_hd_vs_full",
    "delta_bic_vs_bhc", "delta_hd_vs_bhc",
    "time_s", "seed", "timestamp",
]

MEDIAN_COLUMNS = [
    "p", "gen_method", "q", "k0", "N",
    "metric", "linkage", "kspec",
    "delta_bic", "delta_hd", "time_s",
    "delta_bic_vs_bhc", "delta_hd_vs_bhc",
    "n_reps", "n_undefined_hd",
]

SCORE_COLUMNS = ["dataset", "split", "metric", "linkage", "k", "accuracy", "f1"]

_GROUP_KEYS = ["p", "gen_method", "q", "k0", "N", "metric", "linkage", "kspec"]


@dataclass(frozen=True)
class GenMethod:
    """Staging generation mechanism: join(q) or split(k0)."""

    kind: str
    q: float | None = None
    k0: int | None = None

    def __post_init__(self):
        if self.kind == "join":
            if self.q is None or not 0.0 < self.q <= 1.0:
                raise ValidationError("join method needs q in (0, 1]")
        elif self.kind == "split":
            if self.k0 is None or self.k0 < 1:
                raise ValidationError("split method needs k0 >= 1")
        else:
            raise ValidationError(f"unknown generation method {self.kind!r}")

    def staging(self, tree, rng):
        if self.kind == "join":
            return random_staging_join(tree, self.q, rng)
        return random_staging_split(tree, self.k0, rng)


@dataclass(frozen=True)
class GridSpec:
    p_values: tuple[int, ...] = (5, 7, 9, 11)
    methods: tuple[GenMethod, ...] = (
        GenMethod("join", q=0.5),
        GenMethod("join", q=0.9),
        GenMethod("split", k0=2),
    )
    n_values: tuple[int, ...] = (2**7, 2**9, 2**11, 2**13)
    replications: int = 20
    metrics: tuple[str, ...] = METRIC_NAMES
    linkages: tuple[str, ...] = LINKAGE_NAMES
    kspecs: tuple = (2, "auto")
    baselines: tuple[str, ...] = ("full", "bhc")
    alpha: float = 1.0
    kappa: float = 0.5
    bhc_max_p: int = 7
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValidationError("need at least one replication")

    def cells(self) -> list[tuple[int, GenMethod, int]]:
        return [
            (p, m, n)
            for p in self.p_values
            for m in self.methods
            for n in self.n_values
        ]


def study_grid(replications: int = 100, seed: int = 0) -> GridSpec:
    """The full simulation layout: 4 p-values x 3 methods x 4 sample sizes."""
    return GridSpec(replications=replications, seed=seed)


def binary_tree(p: int) -> EventTree:
    return EventTree([VariableSpec(f"X{i+1}", ("0", "1")) for i in range(p)])


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _base_row(p, method: GenMethod, n, rep, seed_tag):
    return {
        "p": p,
        "gen_method": method.kind,
        "q": method.q if method.q is not None else "",
        "k0": method.k0 if method.k0 is not None else "",
        "N": n,
        "rep": rep,
        "seed": seed_tag,
        "timestamp": _now(),
    }


def _run_replication(spec: GridSpec, cell_idx: int, rep: int) -> list[dict]:
    p, method, n = spec.cells()[cell_idx]
    rng = replication_rng(spec.seed, cell_idx, rep)
    seed_tag = f"{spec.seed}.{cell_idx}.{rep}"
    tree = binary_tree(p)
    truth_staging = method.staging(tree, rng)
    truth_model = random_parameters(tree, truth_staging, rng)
    counts = count_transitions(sample(truth_model, n, rng), tree)

    rows: list[dict] = []

    t0 = time.perf_counter()
    full_model = baseline_full(counts, spec.alpha)
    t_full = time.perf_counter() - t0
    full_score = score_bic(full_model, counts)

    bhc_model = bhc_score = None
    t_bhc = math.nan
    if "bhc" in spec.baselines and p <= spec.bhc_max_p:
        t0 = time.perf_counter()
        bhc_model = learn_bhc(counts, spec.alpha)
        t_bhc = time.perf_counter() - t0
        bhc_score = score_bic(bhc_model, counts)

    def comparison(model, score, elapsed):
        out = {
            "bic": score.bic,
            "hd_truth": hamming_distance(model.staging, truth_staging),
            "delta_bic_vs_full": relative_bic(score, full_score),
            "delta_hd_vs_full": relative_hd(model.staging, full_model.staging, truth_staging),
            "time_s": elapsed,
        }
        if bhc_model is not None:
            out["delta_bic_vs_bhc"] = relative_bic(score, bhc_score)
            out["delta_hd_vs_bhc"] = relative_hd(model.staging, bhc_model.staging, truth_staging)
        else:
            out["delta_bic_vs_bhc"] = math.nan
            out["delta_hd_vs_bhc"] = math.nan
        return out

    if "full" in spec.baselines:
        row = _base_row(p, method, n, rep, seed_tag)
        row.update(metric="full", linkage="", kspec="")
        row.update(comparison(full_model, full_score, t_full))
        rows.append(row)
    if bhc_model is not None:
        row = _base_row(p, method, n, rep, seed_tag)
        row.update(metric="bhc", linkage="", kspec="")
        row.update(comparison(bhc_model, bhc_score, t_bhc))
        rows.append(row)

    for metric in spec.metrics:
        for linkage in spec.linkages:
            for kspec in spec.kspecs:
                row = _base_row(p, method, n, rep, seed_tag)
                row.update(metric=metric, linkage=linkage, kspec=str(kspec))
                cfg = LearnConfig(
                    metric=metric, linkage=linkage, k=kspec,
                    alpha=spec.alpha, kappa=spec.kappa,
                )
                try:
                    t0 = time.perf_counter()
                    model = learn_hclust(counts, cfg)
                    elapsed = time.perf_counter() - t0
                    row.update(comparison(model, score_bic(model, counts), elapsed))
                except StagetreeError as exc:  # error row; the grid keeps going
                    logger.warning(
                        "fit failed for %s/%s/%s at %s: %s",
                        metric, linkage, kspec, seed_tag, exc,
                    )
                    row.update(
                        bic=math.nan, hd_truth=math.nan,
                        delta_bic_vs_full=math.nan, delta_hd_vs_full=math.nan,
                        delta_bic_vs_bhc=math.nan, delta_hd_vs_bhc=math.nan,
                        time_s=math.nan,
                    )
                rows.append(row)
    return rows


def _task(args):
    spec, cell_idx, rep = args
    return _run_replication(spec, cell_idx, rep)


def run_grid(spec: GridSpec, jobs: int = 1) -> tuple[list[dict], list[dict]]:
    """Run every replication of every cell; returns (raw rows, medians)."""
    tasks = [
        (spec, cell_idx, rep)
        for cell_idx in range(len(spec.cells()))
        for rep in range(spec.replications)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_task, tasks))
    else:
        chunks = [_task(t) for t in tasks]
    rows = [row for chunk in chunks for row in chunk]  # task order is canonical
    return rows, summarize_medians(rows)


def _is_nan(x) -> bool:
    return isinstance(x, float) and math.isnan(x)


def summarize_medians(rows: list[dict]) -> list[dict]:
    """Median of each index across replications, per configuration group."""
    groups: dict[tuple, list[dict]] = {}
    order: list[tuple] = []
    for row in rows:
        key = tuple(row[k] for k in _GROUP_KEYS)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    def med(values):
        vals = [v for v in values if not _is_nan(v) and v != ""]
        return median_aggregate(vals) if vals else math.nan

    out = []
    for key in order:
        members = groups[key]
        rec = dict(zip(_GROUP_KEYS, key))
        rec["delta_bic"] = med(r["delta_bic_vs_full"] for r in members)
        rec["delta_hd"] = med(r["delta_hd_vs_full"] for r in members)
        rec["time_s"] = med(r["time_s"] for r in members)
        rec["delta_bic_vs_bhc"] = med(r["delta_bic_vs_bhc"] for r in members)
        rec["delta_hd_vs_bhc"] = med(r["delta_hd_vs_bhc"] for r in members)
        rec["n_reps"] = len(members)
        rec["n_undefined_hd"] = sum(1 for r in members if _is_nan(r["delta_hd_vs_full"]))
        out.append(rec)
    return out


def write_rows(path, rows: list[dict], columns: list[str]) -> None:
    """CSV emission; NaN and None become empty fields."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            rec = []
            for col in columns:
                v = row.get(col, "")
                if v is None or _is_nan(v):
                    rec.append("")
                elif isinstance(v, float):
                    rec.append(f"{v:.12g}")
                else:
                    rec.append(str(v))
            writer.writerow(rec)


def read_rows(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def train_test_split(
    data: Dataset, ratio: float, rng: np.random.Generator
) -> tuple[Dataset, Dataset]:
    if not 0.0 < ratio < 1.0:
        raise ValidationError("ratio must lie in (0, 1)")
    n = data.n
    n_train = int(round(ratio * n))
    if n_train < 1 or n_train >= n:
        raise ValidationError(f"degenerate split: {n_train}/{n - n_train}")
    perm = rng.permutation(n)
    return (
        Dataset(data.schema, data.rows[perm[:n_train]]),
        Dataset(data.schema, data.rows[perm[n_train:]]),
    )


def run_classification(
    datasets: list[tuple[str, Dataset]],
    class_name: str,
    cfgs: list[LearnConfig],
    splits: int = 10,
    ratio: float = 0.8,
    seed: int = 0,
) -> tuple[list[dict], list[dict]]:
    """Repeated train/test protocol; returns (per-split rows, median summary)."""
    rows = []
    for d_idx, (name, data) in enumerate(datasets):
        data.column(class_name)  # fail early if the class column is missing
        for split in range(splits):
            train_set, test_set = train_test_split(
                data, ratio, replication_rng(seed, d_idx, split)
            )
            for cfg in cfgs:
                scores = classify_evaluate(
                    classify_train(train_set, class_name, cfg), test_set
                )
                rows.append(
                    {
                        "dataset": name,
                        "split": split,
                        "metric": cfg.metric,
                        "linkage": cfg.linkage,
                        "k": str(cfg.k),
                        "accuracy": scores.accuracy,
                        "f1": scores.f1,
                    }
                )
    summary = []
    seen = []
    for row in rows:
        key = (row["dataset"], row["metric"], row["linkage"], row["k"])
        if key in seen:
            continue
        seen.append(key)
        members = [
            r
            for r in rows
            if (r["dataset"], r["metric"], r["linkage"], r["k"]) == key
        ]
        summary.append(
            {
                "dataset": key[0],
                "metric": key[1],
                "linkage": key[2],
                "k": key[3],
                "accuracy": median_aggregate(r["accuracy"] for r in members),
                "f1": median_aggregate(r["f1"] for r in members),
                "n_splits": len(members),
            }
        )
    return rows, summary
