"""Command-line interface.

Subcommands: fit, simulate, compare, bench, classify.
Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 internal numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .data import read_csv, read_schema, write_csv, count_transitions
from .errors import NumericError, StagetreeError, ValidationError
from .estimation import score_bic
from .evaluate import ComparisonReport, hamming_distance, relative_bic, relative_hd
from .experiment import (
    GenMethod,
    GridSpec,
    MEDIAN_COLUMNS,
    RESULT_COLUMNS,
    SCORE_COLUMNS,
    run_classification,
    run_grid,
    write_rows,
)
from .learn import LearnConfig, baseline_full, learn_bhc, learn_hclust
from .simulate import random_parameters, replication_rng, sample
from .tree import load_model, model_to_dict, save_model
from .experiment import binary_tree


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_k(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    parts = [t for t in text.replace(",", " ").split() if t]
    try:
        values = [int(t) for t in parts]
    except ValueError:
        raise ValidationError(f"--k expects 'auto' or integers, got {text!r}") from None
    if not values:
        raise ValidationError("--k got an empty value")
    return values[0] if len(values) == 1 else values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stagetree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a staged tree model to a CSV dataset")
    fit.add_argument("--data", required=True)
    fit.add_argument("--schema")
    fit.add_argument("--method", required=True, choices=["hclust", "bhc", "full"])
    fit.add_argument("--metric", default="totalvariation")
    fit.add_argument("--linkage", default="ward.D2")
    fit.add_argument("--k", default="auto")
    fit.add_argument("--alpha", type=float, default=1.0)
    fit.add_argument("--kappa", type=float, default=0.5)
    fit.add_argument("--out", required=True)

    sim = sub.add_parser("simulate", help="generate a random model and dataset")
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--gen", required=True, choices=["join", "split"])
    sim.add_argument("--q", type=float)
    sim.add_argument("--k0", type=int)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out-model", required=True)
    sim.add_argument("--out-data", required=True)

    cmp_ = sub.add_parser("compare", help="compare two fitted models")
    cmp_.add_argument("--model", action="append", required=True,
                      help="model JSON; pass twice (model, then baseline)")
    cmp_.add_argument("--truth")
    cmp_.add_argument("--data", required=True)

    bench = sub.add_parser("bench", help="run a simulation grid from a JSON spec")
    bench.add_argument("--grid", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--summary", required=True)
    bench.add_argument("--jobs", type=int, default=1)

    cls = sub.add_parser("classify", help="train/test staged tree classifiers")
    cls.add_argument("--data", required=True)
    cls.add_argument("--class", dest="class_name", required=True)
    cls.add_argument("--splits", type=int, default=10)
    cls.add_argument("--ratio", type=float, default=0.8)
    cls.add_argument("--metric", default="totalvariation")
    cls.add_argument("--linkage", default="ward.D2")
    cls.add_argument("--k", default="2")
    cls.add_argument("--alpha", type=float, default=1.0)
    cls.add_argument("--seed", type=int, default=0)
    cls.add_argument("--out", required=True)

    return parser


def _cmd_fit(args) -> int:
    schema = read_schema(args.schema) if args.schema else None
    data = read_csv(args.data, schema)
    counts = count_transitions(data, data.tree())
    if args.method == "full":
        model = baseline_full(counts, args.alpha)
    elif args.method == "bhc":
        model = learn_bhc(counts, args.alpha)
    else:
        cfg = LearnConfig(
            metric=args.metric, linkage=args.linkage,
            k=_parse_k(args.k), alpha=args.alpha, kappa=args.kappa,
        )
        model = learn_hclust(counts, cfg)
    score = score_bic(model, counts)
    doc = model_to_dict(model)
    doc["score"] = {"loglik": score.loglik, "n_params": score.n_params, "bic": score.bic}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {args.out} (bic={score.bic:.4f})")
    return 0


def _cmd_simulate(args) -> int:
    tree = binary_tree(args.p)
    method = GenMethod(args.gen, q=args.q, k0=args.k0)
    rng = replication_rng(args.seed)
    staging = method.staging(tree, rng)
    model = random_parameters(tree, staging, rng)
    data = sample(model, args.n, rng)
    save_model(model, args.out_model)
    write_csv(data, args.out_data)
    print(f"wrote {args.out_model} and {args.out_data} ({args.n} rows)")
    return 0


def _cmd_compare(args) -> int:
    if len(args.model) != 2:
        raise ValidationError("compare needs exactly two --model arguments")
    model_a = load_model(args.model[0])
    model_b = load_model(args.model[1])
    data = read_csv(args.data, list(model_a.tree.variables))
    counts = count_transitions(data, model_a.tree)
    times = []
    scores = []
    for model in (model_a, model_b):
        t0 = time.perf_counter()
        scores.append(score_bic(model, counts))
        times.append(time.perf_counter() - t0)
    delta_hd = None
    if args.truth:
        truth = load_model(args.truth)
        value = relative_hd(model_a.staging, model_b.staging, truth.staging)
        delta_hd = None if value != value else value
    report = ComparisonReport(
        hd=hamming_distance(model_a.staging, model_b.staging),
        delta_bic=relative_bic(scores[0], scores[1]),
        delta_hd=delta_hd,
        wall_time_s=(times[0], times[1]),
    )
    print(json.dumps(report.to_dict(), indent=1))
    return 0


def _grid_from_json(path) -> GridSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        methods = tuple(
            GenMethod(m["kind"], q=m.get("q"), k0=m.get("k0")) for m in doc["methods"]
        )
        kwargs = dict(
            p_values=tuple(doc["p_values"]),
            methods=methods,
            n_values=tuple(doc["n_values"]),
        )
        for key in ("replications", "metrics", "linkages", "kspecs", "baselines",
                    "alpha", "kappa", "bhc_max_p", "seed"):
            if key in doc:
                value = doc[key]
                kwargs[key] = tuple(value) if isinstance(value, list) else value
        return GridSpec(**kwargs)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed grid spec: {exc}") from exc


def _cmd_bench(args) -> int:
    spec = _grid_from_json(args.grid)
    rows, medians = run_grid(spec, jobs=args.jobs)
    write_rows(args.out, rows, RESULT_COLUMNS)
    write_rows(args.summary, medians, MEDIAN_COLUMNS)
    print(f"wrote {len(rows)} rows to {args.out}, {len(medians)} medians to {args.summary}")
    return 0


def _cmd_classify(args) -> int:
    data = read_csv(args.data)
    cfg = LearnConfig(
        metric=args.metric, linkage=args.linkage,
        k=_parse_k(args.k), alpha=args.alpha,
    )
    rows, summary = run_classification(
        [(args.data, data)], args.class_name, [cfg],
        splits=args.splits, ratio=args.ratio, seed=args.seed,
    )
    write_rows(args.out, rows, SCORE_COLUMNS)
    for rec in summary:
        print(
            f"{rec['dataset']}: median accuracy {rec['accuracy']:.4f}, "
            f"median F1 {rec['f1']:.4f} over {rec['n_splits']} splits"
        )
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
    "bench": _cmd_bench,
    "classify": _cmd_classify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StagetreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
