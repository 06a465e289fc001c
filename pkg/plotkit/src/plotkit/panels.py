"""Faceted panel figures from benchmark CSV artifacts.

The grid figure facets three indices (rows: delta_bic, delta_hd, time_s)
by linkage (columns), drawing one colored series per metric against N or
p, with a dashed zero line marking the reference baseline on the delta
panels. The classification figure pairs an accuracy panel over an F1
panel per dataset, one colored point per CSV row.

Everything is drawn straight from the CSV: all aggregation (medians) is
expected to have happened upstream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from matplotlib.figure import Figure

__all__ = ["PlotkitError", "PanelSpec", "read_csv_rows", "render_grid", "render_classification"]

GRID_INDICES = ("delta_bic", "delta_hd", "time_s")
INDEX_LABELS = {"delta_bic": "relative BIC", "delta_hd": "relative HD", "time_s": "time (s)"}
SERIES_COLORS = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb",
)


class PlotkitError(Exception):
    """Bad input file or panel specification."""


@dataclass(frozen=True)
class PanelSpec:
    """Layout of the benchmark grid figure."""

    x: str = "N"
    indices: tuple[str, ...] = GRID_INDICES
    zero_reference: bool = True

    def __post_init__(self):
        if self.x not in ("N", "p"):
            raise PlotkitError(f"x axis must be 'N' or 'p', got {self.x!r}")


def read_csv_rows(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise PlotkitError(f"{path}: empty CSV")
    return rows


def _require_columns(rows: list[dict], needed) -> None:
    missing = [c for c in needed if c not in rows[0]]
    if missing:
        raise PlotkitError(f"missing columns: {', '.join(missing)}")


def _ordered_unique(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def render_grid(csv_path, spec: PanelSpec | None = None, out_path=None) -> Figure:
    """Indices x linkages panel grid; returns the figure, optionally saved."""
    spec = spec or PanelSpec()
    rows = read_csv_rows(csv_path)
    _require_columns(rows, (spec.x, "metric", "linkage", *spec.indices))
    rows = [r for r in rows if r["linkage"]]  # baseline rows carry no linkage
    if not rows:
        raise PlotkitError("no learner rows to plot")
    linkages = _ordered_unique(r["linkage"] for r in rows)
    metrics = _ordered_unique(r["metric"] for r in rows)
    xs = sorted({float(r[spec.x]) for r in rows})

    fig = Figure(figsize=(3.2 * len(linkages), 2.6 * len(spec.indices)))
    axes = fig.subplots(len(spec.indices), len(linkages), squeeze=False)
    for i, index in enumerate(spec.indices):
        for j, linkage in enumerate(linkages):
            ax = axes[i][j]
            for m, metric in enumerate(metrics):
                pts = sorted(
                    (float(r[spec.x]), float(r[index]))
                    for r in rows
                    if r["linkage"] == linkage and r["metric"] == metric and r[index] != ""
                )
                if pts:
                    ax.plot(
                        [x for x, _ in pts],
                        [y for _, y in pts],
                        marker="o",
                        color=SERIES_COLORS[m % len(SERIES_COLORS)],
                        label=metric,
                    )
            if spec.zero_reference and index != "time_s":
                ax.axhline(0.0, color="black", linestyle="--", linewidth=1.0)
            if spec.x == "N":
                ax.set_xscale("log", base=2)
            ax.set_xticks(xs)
            ax.set_xticklabels([f"{x:g}" for x in xs])
            ax.minorticks_off()
            if i == 0:
                ax.set_title(linkage)
            if i == len(spec.indices) - 1:
                ax.set_xlabel(spec.x)
            if j == 0:
                ax.set_ylabel(INDEX_LABELS.get(index, index))
    handles, labels = axes[0][0].get_legend_handles_labels()
    if handles:
        fig.legend(handles, labels, loc="lower center", ncol=min(len(labels), 6))
    fig.tight_layout(rect=(0, 0.06, 1, 1))
    if out_path is not None:
        fig.savefig(out_path, dpi=120)
    return fig


def render_classification(csv_path, out_path=None) -> Figure:
    """Paired accuracy/F1 panels per dataset, one point per CSV row."""
    rows = read_csv_rows(csv_path)
    _require_columns(rows, ("dataset", "metric", "accuracy", "f1"))
    datasets = _ordered_unique(r["dataset"] for r in rows)
    metrics = _ordered_unique(r["metric"] for r in rows)
    color_of = {m: SERIES_COLORS[i % len(SERIES_COLORS)] for i, m in enumerate(metrics)}

    fig = Figure(figsize=(2.4 * len(datasets) + 1.2, 5.0))
    axes = fig.subplots(2, len(datasets), squeeze=False)
    for j, dataset in enumerate(datasets):
        members = [r for r in rows if r["dataset"] == dataset]
        for i, column in enumerate(("accuracy", "f1")):
            ax = axes[i][j]
            for r in members:
                ax.plot(
                    metrics.index(r["metric"]),
                    float(r[column]),
                    marker="o",
                    linestyle="none",
                    color=color_of[r["metric"]],
                )
            ax.set_xticks(range(len(metrics)))
            ax.set_xticklabels(metrics, rotation=60, fontsize=7)
            ax.set_ylim(0.0, 1.05)
            if i == 0:
                ax.set_title(dataset, fontsize=9)
            if j == 0:
                ax.set_ylabel(column)
    fig.tight_layout()
    if out_path is not None:
        fig.savefig(out_path, dpi=120)
    return fig
