"""Command-line entry point: attribute, explain, and mitigate subcommands.

Exit codes
----------
attribute: 0 success, 1 I/O or schema error, 2 solver non-convergence.
explain:   additionally 3 when the queried sample has no comparable
           other-group evidence.
mitigate:  additionally 4 on an exact class tie without --tie-label.

All report files are written atomically (temp file then rename).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .attribution import attribute
from .comparability import ComparabilityConfig, build_comparability_graph
from .data import (
    ParseError,
    SchemaError,
    ValidationError,
    apply_normalization,
    encode_features,
    fit_normalization,
    invert_normalization,
    load_dataset,
    load_schema,
    save_dataset,
    stratified_split,
)
from .metrics import evaluate_classifier
from .mitigation import (
    ClassBalanceTieError,
    RemovalPlan,
    apply_plan,
    plan_removal,
    synthesize_fair_samples,
    write_plan,
)
from .model import train_classifier
from .similarity import (
    ConvergenceError,
    adjacency_similarity,
    rwr_proximity,
    symmetric_normalize,
)

_LOAD_ERRORS = (OSError, SchemaError, ParseError, ValidationError)


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_file(path, writer):
    """Run `writer(tmp_path)` and rename the result into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(args):
    schema = load_schema(args.schema)
    return load_dataset(args.input, schema)


def _attribute_from_args(args, dataset, top_k=None):
    cfg = ComparabilityConfig(t_r=args.tr, t_d=args.td)
    params = fit_normalization(dataset)
    normalized = apply_normalization(dataset, params)
    report = attribute(
        normalized,
        cfg,
        damping=args.damping,
        top_k=args.topk if top_k is None else top_k,
        similarity=args.similarity,
        backend="iterative",
    )
    return report, normalized, params


def cmd_attribute(args) -> int:
    try:
        dataset = _load(args)
    except _LOAD_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        report, _, _ = _attribute_from_args(args, dataset)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_path = os.path.join(args.out, "bias_report.txt")
    try:
        os.makedirs(args.out, exist_ok=True)
        _atomic_write(out_path, report.to_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not report.bias.defined.any():
        print("warning: no sample has comparable other-group evidence; "
              "all bias entries are undefined", file=sys.stderr)
    print(f"wrote {out_path}")
    return 0


def _format_row(dataset, i):
    feats = [format(v, ".6f") for v in dataset.numericals[i]]
    feats += [dataset.category_levels[j][dataset.categoricals[i, j]]
              for j in range(dataset.n_categorical)]
    return feats


def cmd_explain(args) -> int:
    try:
        dataset = _load(args)
    except _LOAD_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not 0 <= args.index < dataset.n:
        print(f"error: sample index {args.index} out of range", file=sys.stderr)
        return 1
    try:
        report, _, _ = _attribute_from_args(args, dataset)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    record = report.records[args.index]
    feature_names = list(dataset.schema.numerical_names) + list(dataset.schema.categorical_names)
    header = ["row", "index"] + feature_names + [
        dataset.schema.group_name, dataset.schema.label_name,
        "bias/contrib", "credibility", "similarity",
    ]
    print("\t".join(header))
    query_cells = (
        ["query", str(record.index)]
        + _format_row(dataset, record.index)
        + [str(record.group), str(record.label), f"{record.bias:.6f}", "-", "-"]
    )
    print("\t".join(query_cells))
    if not record.defined:
        print("no comparable other-group evidence", file=sys.stderr)
        return 3
    for rank, e in enumerate(record.explanations[: args.topk], start=1):
        cells = (
            [f"expl{rank}", str(e.index)]
            + _format_row(dataset, e.index)
            + [
                str(int(dataset.groups[e.index])),
                str(int(dataset.labels[e.index])),
                f"{e.contribution:.6f}",
                f"{e.credibility:.6f}",
                f"{e.similarity:.6f}",
            ]
        )
        print("\t".join(cells))
    return 0


def cmd_mitigate(args) -> int:
    try:
        dataset = _load(args)
        train_idx, _, test_idx = stratified_split(dataset, seed=args.seed)[0]
    except _LOAD_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    train_raw = dataset.subset(train_idx)
    test_raw = dataset.subset(test_idx)

    try:
        report, train, params = _attribute_from_args(args, train_raw, top_k=0)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    test = apply_normalization(test_raw, params)

    try:
        if args.strategy == "rem":
            plan = plan_removal(train, report.bias, args.budget, tie_label=args.tie_label)
        else:
            cfg = ComparabilityConfig(t_r=args.tr, t_d=args.td)
            graph = build_comparability_graph(train, cfg)
            if args.similarity == "rwr":
                q = rwr_proximity(symmetric_normalize(graph), damping=args.damping,
                                  backend="iterative")
            else:
                q = adjacency_similarity(graph)
            plan = synthesize_fair_samples(
                train, report.bias, q, args.budget,
                n_nb=args.neighbors, rng_seed=args.seed, tie_label=args.tie_label,
            )
    except ClassBalanceTieError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    edited = apply_plan(train, plan)
    clf_before = train_classifier(encode_features(train), train.labels)
    clf_after = train_classifier(encode_features(edited), edited.labels)
    before = evaluate_classifier(clf_before, test)
    after = evaluate_classifier(clf_after, test)

    try:
        os.makedirs(args.out, exist_ok=True)
        edited_raw = invert_normalization(edited, params)
        _atomic_file(os.path.join(args.out, "edited_dataset.csv"),
                     lambda p: save_dataset(edited_raw, p))
        _atomic_file(os.path.join(args.out, "plan.txt"),
                     lambda p: write_plan(plan, train, p))
        _atomic_write(os.path.join(args.out, "metrics_before.txt"), before.to_text())
        _atomic_write(os.path.join(args.out, "metrics_after.txt"), after.to_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if args.control == "random":
        rng = np.random.default_rng(args.seed)
        size = min(args.budget, train.n)
        ctrl_idx = np.sort(rng.choice(train.n, size=size, replace=False))
        ctrl_plan = RemovalPlan(indices=tuple(int(i) for i in ctrl_idx), budget=args.budget)
        ctrl_train = apply_plan(train, ctrl_plan)
        clf_ctrl = train_classifier(encode_features(ctrl_train), ctrl_train.labels)
        control = evaluate_classifier(clf_ctrl, test)
        _atomic_write(os.path.join(args.out, "metrics_control.txt"), control.to_text())

    print(f"edited {train.n} -> {edited.n} training samples; reports in {args.out}")
    print("before\t" + before.to_text().strip())
    print("after\t" + after.to_text().strip())
    return 0


def _add_common(parser):
    parser.add_argument("--input", required=True, help="delimited dataset file")
    parser.add_argument("--schema", required=True, help="schema descriptor file")
    parser.add_argument("--tr", type=float, default=0.1,
                        help="max per-feature numerical disparity (default 0.1)")
    parser.add_argument("--td", type=int, default=2,
                        help="max count of differing categorical features (default 2)")
    parser.add_argument("--damping", type=float, default=0.1,
                        help="walk continuation probability (default 0.1)")
    parser.add_argument("--similarity", choices=("rwr", "adjacency"), default="rwr")
    parser.add_argument("--topk", type=int, default=5, help="explanations per sample")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biasaudit",
        description="Attribute, explain, and mitigate per-sample bias in tabular data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_att = sub.add_parser("attribute", help="score every sample and write a bias report")
    _add_common(p_att)
    p_att.add_argument("--out", required=True, help="output directory")
    p_att.set_defaults(func=cmd_attribute)

    p_exp = sub.add_parser("explain", help="print the top contributors to one sample's bias")
    _add_common(p_exp)
    p_exp.add_argument("--index", type=int, required=True, help="sample row to explain")
    p_exp.set_defaults(func=cmd_explain)

    p_mit = sub.add_parser("mitigate", help="edit the training split and report before/after metrics")
    _add_common(p_mit)
    p_mit.add_argument("--out", required=True, help="output directory")
    p_mit.add_argument("--strategy", choices=("rem", "aug"), required=True)
    p_mit.add_argument("--budget", type=int, required=True, help="samples to remove or add")
    p_mit.add_argument("--neighbors", type=int, default=5, help="mixup neighborhood size")
    p_mit.add_argument("--control", choices=("none", "random"), default="none",
                       help="also evaluate a random-removal control at the same budget")
    p_mit.add_argument("--tie-label", type=int, choices=(0, 1), default=None, dest="tie_label",
                       help="target class override when label counts are exactly tied")
    p_mit.set_defaults(func=cmd_mitigate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
