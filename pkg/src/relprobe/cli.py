"""Batch driver: score datasets against representations, validate interchange files."""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .classifiers import ClassifierSpec, labeled_vectors_from, loo_association, mean_pool
from .datasets import DatasetError, load_dataset, to_gold_matrix
from .embeddings import (
    load_static_embeddings,
    lookup_phrase,
    sniff_embedding_format,
)
from .evaluation import (
    evaluate,
    frequency_correlation_with_stats,
    load_frequencies,
)
from .measures import build_association_matrix, load_contextual_vectors
from .probscores import (
    clm_association,
    load_probability_table,
    mlm_association,
)
from .report import emit_score_table, render_heatmap

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

VECTOR_METHODS = {
    "cos": None,  # cosine for static, set-mean cosine for contextual
    "dist": "distance_correlation",
    "kend": "kendall",
    "pear": "pearson",
    "spear": "spearman",
    "maha": "neg_mahalanobis",
}
MLM_METHODS = {"m-s": "mask_source", "m-t": "mask_target"}
CLM_METHODS = {
    "p-s": ("predict_source", "raw"),
    "p-s-l": ("predict_source", "log_prior_ratio"),
    "p-t": ("predict_target", "raw"),
    "p-t-l": ("predict_target", "log_prior_ratio"),
}
CLF_METHODS = {"knn": "knn", "svm": "linear_svm", "ffn": "ffn"}
ALL_METHODS = list(VECTOR_METHODS) + list(MLM_METHODS) + list(CLM_METHODS) + list(CLF_METHODS)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("score", help="score a dataset against a representation")
    sc.add_argument("--dataset", required=True)
    sc.add_argument("--embeddings")
    sc.add_argument("--contextual", nargs=2, metavar=("SRC", "TGT"))
    sc.add_argument("--probs")
    sc.add_argument("--method", required=True,
                    help="comma-separated: " + ", ".join(ALL_METHODS))
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--permutations", type=int, default=10000)
    sc.add_argument("--out", default=os.environ.get("RELPROBE_OUT"))
    sc.add_argument("--format", choices=["csv", "markdown"], default="csv")
    sc.add_argument("--emit-heatmaps", action="store_true")
    sc.add_argument("--freq")
    sc.add_argument("--allow-drop", action="store_true")
    sc.add_argument("--embedding-format",
                    choices=["auto", "text-with-header", "text-headerless"], default="auto")
    sc.add_argument("--no-lowercase", action="store_true")

    va = sub.add_parser("validate", help="check interchange files against their schemas")
    va.add_argument("paths", nargs="+", metavar="PATH")
    va.add_argument("--kind",
                    choices=["auto", "dataset", "embeddings", "contextual", "probs", "frequency"],
                    default="auto")
    return parser


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _check_method_compat(methods: list[str], args) -> None:
    reprs = [name for name, given in [
        ("--embeddings", args.embeddings),
        ("--contextual", args.contextual),
        ("--probs", args.probs),
    ] if given]
    if len(reprs) != 1:
        raise UsageError("exactly one of --embeddings, --contextual, --probs is required")
    rep = reprs[0]
    for m in methods:
        if m not in ALL_METHODS:
            raise UsageError(f"unknown method {m!r}; known: {', '.join(ALL_METHODS)}")
        needs_probs = m in MLM_METHODS or m in CLM_METHODS
        if needs_probs and rep != "--probs":
            raise UsageError(f"method {m!r} needs a probability table (--probs), got {rep}")
        if not needs_probs and rep == "--probs":
            raise UsageError(f"method {m!r} needs word vectors (--embeddings/--contextual), got --probs")


def cmd_score(args) -> int:
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    if not methods:
        raise UsageError("no methods given")
    _check_method_compat(methods, args)
    if args.out is None:
        raise UsageError("--out is required (or set RELPROBE_OUT)")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lowercase = not args.no_lowercase

    ds = load_dataset(args.dataset)
    gold = to_gold_matrix(ds)

    store = ctx_pair = table = None
    input_files = {"dataset": args.dataset}
    if args.embeddings:
        fmt = args.embedding_format
        if fmt == "auto":
            fmt = sniff_embedding_format(args.embeddings)
        store = load_static_embeddings(args.embeddings, format=fmt)
        input_files["embeddings"] = args.embeddings
    elif args.contextual:
        ctx_pair = (load_contextual_vectors(args.contextual[0]),
                    load_contextual_vectors(args.contextual[1]))
        input_files["contextual_sources"] = args.contextual[0]
        input_files["contextual_targets"] = args.contextual[1]
    else:
        table = load_probability_table(args.probs)
        input_files["probs"] = args.probs

    freq = None
    if args.freq:
        freq = load_frequencies(args.freq)
        input_files["frequency"] = args.freq

    reports = []
    matrices = {}
    skipped: list[str] = []
    for m in methods:
        assoc = _build_matrix(m, args, ds, store, ctx_pair, table, lowercase)
        if assoc is None:
            skipped.append(m)
            print(f"method {m}: no records for this direction in the table; skipped",
                  file=sys.stderr)
            continue
        assoc.method = m  # report tables carry the short method key
        matrices[m] = assoc
        reports.append(evaluate(assoc, gold, relation=ds.relation_name,
                                n_perm=args.permutations, seed=args.seed))

    if not reports:
        raise DatasetError("no method produced an association matrix")

    table_text = emit_score_table(reports, format=args.format)
    table_path = out_dir / ("scores.csv" if args.format == "csv" else "scores.md")
    table_path.write_text(table_text, encoding="utf-8")

    if args.emit_heatmaps:
        for m, assoc in matrices.items():
            svg = render_heatmap(assoc, gold, title=f"{assoc.model} {m}")
            (out_dir / f"heatmap_{m}.svg").write_text(svg, encoding="utf-8")

    if freq is not None:
        lines = ["target," + ",".join(f"{matrices[m].model}/{m}" for m in matrices)]
        per_method = {m: frequency_correlation_with_stats(
            matrices[m], freq, gold, n_perm=args.permutations, seed=args.seed)[0]
            for m in matrices}
        for t in gold.targets:
            cells = []
            for m in matrices:
                d, p = per_method[m].get(t, (0.0, 1.0))
                cells.append(f"{d:.2f}" + ("*" if p < 0.1 else ""))
            lines.append(t.replace(",", " ") + "," + ",".join(cells))
        (out_dir / "freq_scores.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    manifest = {
        "command": "score",
        "flags": {
            "methods": methods,
            "format": args.format,
            "seed": args.seed,
            "permutations": args.permutations,
            "allow_drop": args.allow_drop,
            "emit_heatmaps": args.emit_heatmaps,
            "lowercase": lowercase,
            "skipped_methods": skipped,
        },
        "inputs": {k: {"path": v, "sha256": _sha256(v)} for k, v in input_files.items()},
        "versions": {
            "relprobe": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    # wall-clock time lives outside the manifest so reruns stay byte-identical
    (out_dir / "started_at.txt").write_text(
        datetime.datetime.now(datetime.timezone.utc).isoformat() + "\n", encoding="utf-8")

    for rep in reports:
        star = "*" if rep.conc.p_value < 0.01 else ""
        print(f"{rep.relation} {rep.model}/{rep.method}: CONC={rep.conc.dcor:.2f}{star}")
    return EXIT_OK


def _build_matrix(method, args, ds, store, ctx_pair, table, lowercase):
    if method in VECTOR_METHODS:
        if method == "cos":
            measure = "cosine" if store is not None else "set_mean_cosine"
        else:
            measure = VECTOR_METHODS[method]
        return build_association_matrix(
            store if store is not None else ctx_pair, ds, measure, lowercase=lowercase)
    if method in MLM_METHODS:
        return mlm_association(table, ds, MLM_METHODS[method], allow_drop=args.allow_drop)
    if method in CLM_METHODS:
        direction, weighting = CLM_METHODS[method]
        return clm_association(table, ds, direction, weighting, allow_drop=args.allow_drop)
    kind = CLF_METHODS[method]
    if store is not None:
        def vector_of(word):
            return lookup_phrase(store, word, lowercase)
        model = store.name
    else:
        src_set = ctx_pair[0]

        def vector_of(word):
            key = word if word in src_set else (word.lower() if lowercase else word)
            return mean_pool(src_set.data[key]) if key in src_set else None
        model = src_set.model
    data = labeled_vectors_from(ds, vector_of)
    spec = ClassifierSpec(kind=kind, seed=args.seed)
    return loo_association(spec, data, repeats=100, model=model)


def _detect_kind(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".json":
        return "dataset"
    if suffix == ".jsonl":
        with open(path, encoding="utf-8") as fh:
            first = fh.readline()
        try:
            fmt = json.loads(first).get("format")
        except json.JSONDecodeError:
            return "contextual"
        return "probs" if fmt == "probability-table" else "contextual"
    if suffix == ".tsv":
        return "frequency"
    return "embeddings"


def _validate_embeddings_strict(path: Path) -> list[str]:
    problems: list[str] = []
    fmt = sniff_embedding_format(path)
    dimension = None
    seen: set[str] = set()
    with open(path, encoding="utf-8", newline=None) as fh:
        start = 1
        if fmt == "text-with-header":
            fh.readline()
            start = 2
        for lineno, line in enumerate(fh, start=start):
            line = line.rstrip("\r\n")
            if not line:
                continue
            parts = line.split(" ")
            if len(parts) < 2:
                problems.append(f"{path}:{lineno}: truncated row ({len(parts)} fields)")
                continue
            if dimension is None:
                dimension = len(parts) - 1
            elif len(parts) - 1 != dimension:
                problems.append(
                    f"{path}:{lineno}: row has {len(parts) - 1} values, expected {dimension}")
                continue
            token = parts[0]
            if token in seen:
                problems.append(f"{path}:{lineno}: duplicate token {token!r}")
            seen.add(token)
            for v in parts[1:]:
                try:
                    x = float(v)
                except ValueError:
                    problems.append(f"{path}:{lineno}: non-numeric value {v!r}")
                    break
                if x != x or x in (float("inf"), float("-inf")):
                    problems.append(f"{path}:{lineno}: non-finite value {v!r}")
                    break
    if dimension is None:
        problems.append(f"{path}: no embedding rows")
    return problems


def cmd_validate(args) -> int:
    any_bad = False
    for raw in args.paths:
        path = Path(raw)
        problems: list[str] = []
        if not path.exists():
            problems = [f"{path}: file not found"]
        else:
            kind = args.kind if args.kind != "auto" else _detect_kind(path)
            try:
                if kind == "dataset":
                    load_dataset(path)
                elif kind == "embeddings":
                    problems = _validate_embeddings_strict(path)
                elif kind == "contextual":
                    load_contextual_vectors(path)
                elif kind == "probs":
                    load_probability_table(path)
                elif kind == "frequency":
                    load_frequencies(path)
            except Exception as exc:
                problems = [str(exc)]
        if problems:
            any_bad = True
            for p in problems:
                print(p, file=sys.stderr)
        else:
            print(f"OK {path}")
    return EXIT_DATA if any_bad else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "score":
            return cmd_score(args)
        return cmd_validate(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())
