"""Categorical dataset ingestion and per-situation transition counting."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import kernels
from .errors import ValidationError
from .tree import EventTree, Staging, VariableSpec

__all__ = [
    "Dataset",
    "CountTable",
    "read_csv",
    "read_schema",
    "count_transitions",
    "pool_counts",
]


@dataclass(frozen=True)
class Dataset:
    """Rows of level indices under a fixed variable schema."""

    schema: tuple[VariableSpec, ...]
    rows: np.ndarray  # (n, p) int64

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValidationError("dataset needs at least one row")
        if rows.shape[1] != len(self.schema):
            raise ValidationError("row width does not match schema")
        for j, var in enumerate(self.schema):
            col = rows[:, j]
            if col.min() < 0 or col.max() >= var.size:
                raise ValidationError(f"column {var.name!r} has out-of-range level index")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "schema", tuple(self.schema))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return len(self.schema)

    def tree(self) -> EventTree:
        return EventTree(self.schema)

    def column(self, name: str) -> int:
        for j, var in enumerate(self.schema):
            if var.name == name:
                return j
        raise ValidationError(f"no column named {name!r}")

    def reorder(self, order: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.schema[j] for j in order), self.rows[:, list(order)])


def _open_text(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise ValidationError(f"unsupported CSV source {type(source)!r}")


def read_csv(source, schema: Sequence[VariableSpec] | None = None) -> Dataset:
    """Read a header-first categorical CSV into a Dataset.

    Without a schema, each column's levels are the sorted distinct values
    observed. With a schema, column names and level labels must match it.
    """
    with _open_text(source) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("empty CSV") from None
        header = [h.strip() for h in header]
        raw = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ValidationError(
                    f"line {lineno}: expected {len(header)} fields, got {len(rec)}"
                )
            raw.append(rec)
    if not raw:
        raise ValidationError("CSV contains a header but no data rows")

    cols = list(zip(*raw))
    if schema is None:
        specs = []
        for name, col in zip(header, cols):
            levels = tuple(sorted(set(col)))
            if len(levels) < 2:
                raise ValidationError(
                    f"column {name!r} has a single distinct value; supply a schema"
                )
            specs.append(VariableSpec(name, levels))
    else:
        specs = list(schema)
        names = [v.name for v in specs]
        if names != header:
            raise ValidationError(f"CSV header {header} does not match schema {names}")

    rows = np.empty((len(raw), len(specs)), dtype=np.int64)
    for j, (var, col) in enumerate(zip(specs, cols)):
        lut = {lab: i for i, lab in enumerate(var.levels)}
        try:
            rows[:, j] = [lut[v] for v in col]
        except KeyError as exc:
            raise ValidationError(
                f"unknown level {exc.args[0]!r} in column {var.name!r}"
            ) from None
    return Dataset(tuple(specs), rows)


def read_schema(source) -> list[VariableSpec]:
    """Read a schema sidecar: {"variables": [{"name":..., "levels":[...]}]}."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    try:
        return [VariableSpec(v["name"], tuple(v["levels"])) for v in doc["variables"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed schema document: {exc}") from exc


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([v.name for v in dataset.schema])
        levels = [v.levels for v in dataset.schema]
        for row in dataset.rows:
            writer.writerow([levels[j][x] for j, x in enumerate(row)])


class CountTable:
    """Per-depth transition counts: tables[d][situation, next value]."""

    def __init__(self, tree: EventTree, tables: Sequence[np.ndarray]):
        if len(tables) != tree.p:
            raise ValidationError("count table depth mismatch")
        mats = []
        for d, t in enumerate(tables):
            t = np.asarray(t, dtype=np.int64)
            expect = (tree.n_situations(d), tree.branching(d))
            if t.shape != expect:
                raise ValidationError(f"counts[{d}] shape {t.shape}, expected {expect}")
            if t.min() < 0:
                raise ValidationError("negative count")
            if d > 0 and not np.array_equal(t.sum(axis=1), mats[d - 1].ravel()):
                raise ValidationError(
                    f"counts[{d}] row sums disagree with the parent cells"
                )
            t.setflags(write=False)
            mats.append(t)
        self.tree = tree
        self.tables = tuple(mats)

    @property
    def n(self) -> int:
        return int(self.tables[0].sum())

    def __eq__(self, other):
        return (
            isinstance(other, CountTable)
            and self.tree == other.tree
            and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables))
        )

    def add(self, other: "CountTable") -> "CountTable":
        """Merge partial tables from partitioned counting."""
        if other.tree != self.tree:
            raise ValidationError("cannot merge counts from different trees")
        return CountTable(
            self.tree, [a + b for a, b in zip(self.tables, other.tables)]
        )


def count_transitions(data: Dataset, tree: EventTree) -> CountTable:
    """Count n(context, next value) for every situation of every depth."""
    if tuple(data.schema) != tree.variables:
        raise ValidationError("dataset schema does not match tree variables")
    rows = data.rows
    tables = []
    codes = np.zeros(rows.shape[0], dtype=np.int64)
    for d in range(tree.p):
        s = tree.branching(d)
        tables.append(
            kernels.count_pairs(codes, rows[:, d].astype(np.int64), tree.n_situations(d), s)
        )
        codes = codes * s + rows[:, d]
    return CountTable(tree, tables)


def pool_counts(counts: CountTable, staging: Staging) -> list[np.ndarray]:
    """Sum count rows over the members of each stage, per depth."""
    if staging.tree != counts.tree:
        raise ValidationError("staging and counts belong to different trees")
    pooled = []
    for d in range(counts.tree.p):
        k = staging.n_stages(d)
        out = np.zeros((k, counts.tree.branching(d)), dtype=np.int64)
        np.add.at(out, staging.labels[d], counts.tables[d])
        pooled.append(out)
    return pooled
