import csv

import pytest

from plotkit import PanelSpec, PlotkitError, render_classification, render_grid

MEDIAN_COLUMNS = [
    "p", "gen_method", "q", "k0", "N", "metric", "linkage", "kspec",
    "delta_bic", "delta_hd", "time_s", "delta_bic_vs_bhc", "delta_hd_vs_bhc",
    "n_reps", "n_undefined_hd",
]

LINKAGES = ["average", "complete", "mcquitty", "ward.D2"]
METRICS = ["totalvariation", "hellinger", "fisher", "jensenshannon", "kaniadakis", "totalkl"]
N_VALUES = [128, 512, 2048, 8192]
P_VALUES = [5, 7, 9, 11]


def write_medians_csv(path, x="N"):
    """One-cell benchmark medians: every linkage/metric at each x value."""
    xs = N_VALUES if x == "N" else P_VALUES
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=MEDIAN_COLUMNS)
        writer.writeheader()
        for xi, xv in enumerate(xs):
            for li, linkage in enumerate(LINKAGES):
                for mi, metric in enumerate(METRICS):
                    writer.writerow(
                        {
                            "p": xv if x == "p" else 5,
                            "gen_method": "join",
                            "q": 0.9,
                            "k0": "",
                            "N": xv if x == "N" else 512,
                            "metric": metric,
                            "linkage": linkage,
                            "kspec": "auto",
                            "delta_bic": 0.01 * (mi + 1) / (xi + 1),
                            "delta_hd": 0.05 * (mi + 1) / (li + 1),
                            "time_s": 0.001 * (xi + 1),
                            "delta_bic_vs_bhc": 0.001 * mi,
                            "delta_hd_vs_bhc": 0.002 * mi,
                            "n_reps": 20,
                            "n_undefined_hd": 0,
                        }
                    )
            # baseline row: no linkage, must be ignored by the grid renderer
            writer.writerow(
                {
                    "p": xv if x == "p" else 5, "gen_method": "join", "q": 0.9,
                    "k0": "", "N": xv if x == "N" else 512, "metric": "full",
                    "linkage": "", "kspec": "", "delta_bic": 0.0, "delta_hd": 0.0,
                    "time_s": 0.001, "delta_bic_vs_bhc": "", "delta_hd_vs_bhc": "",
                    "n_reps": 20, "n_undefined_hd": 0,
                }
            )


def write_scores_csv(path, datasets=("toy",), same_height=False):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["dataset", "split", "metric", "linkage", "k", "accuracy", "f1"]
        )
        writer.writeheader()
        for dataset in datasets:
            for mi, metric in enumerate(METRICS[:5]):
                writer.writerow(
                    {
                        "dataset": dataset,
                        "split": 0,
                        "metric": metric,
                        "linkage": "ward.D2",
                        "k": "2",
                        "accuracy": 0.9 if same_height else 0.8 + 0.02 * mi,
                        "f1": 0.85 if same_height else 0.75 + 0.02 * mi,
                    }
                )


def dashed_zero_lines(ax):
    return [
        line
        for line in ax.lines
        if line.get_linestyle() == "--" and set(line.get_ydata()) == {0.0}
    ]


@pytest.mark.parametrize("x,ticks", [("N", N_VALUES), ("p", P_VALUES)])
def test_grid_structure(tmp_path, x, ticks):
    src = tmp_path / "medians.csv"
    write_medians_csv(src, x=x)
    out = tmp_path / f"grid_{x}.png"
    fig = render_grid(src, PanelSpec(x=x), out)
    assert out.exists()
    axes = fig.axes
    assert len(axes) == 3 * 4  # indices x linkages
    for ax in axes:
        assert sorted(ax.get_xticks().tolist()) == [float(t) for t in ticks]
    # dashed zero reference on every delta panel (top two rows)
    for ax in axes[:8]:
        assert dashed_zero_lines(ax), ax.get_title()
    # six series per panel
    for ax in axes:
        solid = [l for l in ax.lines if l.get_linestyle() == "-"]
        assert len(solid) == 6


def test_grid_titles_follow_linkage_order(tmp_path):
    src = tmp_path / "medians.csv"
    write_medians_csv(src)
    fig = render_grid(src, PanelSpec())
    assert [ax.get_title() for ax in fig.axes[:4]] == LINKAGES


def test_grid_rerender_is_structurally_identical(tmp_path):
    src = tmp_path / "medians.csv"
    write_medians_csv(src)

    def signature(fig):
        return [
            (
                ax.get_title(),
                tuple(ax.get_xticks().tolist()),
                len(ax.lines),
                tuple(tuple(l.get_ydata()) for l in ax.lines),
            )
            for ax in fig.axes
        ]

    assert signature(render_grid(src, PanelSpec())) == signature(
        render_grid(src, PanelSpec())
    )


def test_grid_missing_columns(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("a,b\n1,2\n")
    with pytest.raises(PlotkitError, match="missing columns"):
        render_grid(src, PanelSpec())


def test_grid_empty_csv_writes_nothing(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("")
    out = tmp_path / "fig.png"
    with pytest.raises(PlotkitError):
        render_grid(src, PanelSpec(), out)
    assert not out.exists()


def test_classification_structure(tmp_path):
    src = tmp_path / "scores.csv"
    write_scores_csv(src)
    out = tmp_path / "classify.png"
    fig = render_classification(src, out)
    assert out.exists()
    assert len(fig.axes) == 2  # accuracy over F1 for the single dataset
    for ax in fig.axes:
        points = [l for l in ax.lines if l.get_linestyle() == "None"]
        assert len(points) == 5


def test_classification_same_height_points(tmp_path):
    src = tmp_path / "scores.csv"
    write_scores_csv(src, same_height=True)
    fig = render_classification(src)
    top = fig.axes[0]
    heights = {l.get_ydata()[0] for l in top.lines if l.get_linestyle() == "None"}
    assert heights == {0.9}


def test_classification_multiple_datasets(tmp_path):
    src = tmp_path / "scores.csv"
    write_scores_csv(src, datasets=("one", "two", "three"))
    fig = render_classification(src)
    assert len(fig.axes) == 6
    assert [ax.get_title() for ax in fig.axes[:3]] == ["one", "two", "three"]


def test_classification_empty_csv(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("dataset,split,metric,linkage,k,accuracy,f1\n")
    out = tmp_path / "fig.png"
    with pytest.raises(PlotkitError):
        render_classification(src, out)
    assert not out.exists()
