"""CLI for materializing interchange files from pretrained language models."""

from __future__ import annotations

import argparse
import sys

from .backends import LMBackend
from .exports import (
    export_clm_probs,
    export_contextual_vectors,
    export_mlm_probs,
    export_relation_probs,
)
from .templates import battery_for
from .writers import read_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relprobe-export", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="model id or local directory")
        p.add_argument("--revision", default=None)
        p.add_argument("--dataset", required=True)
        p.add_argument("--out", required=True)

    cv = sub.add_parser("contextual", help="per-template word vectors (subword max)")
    common(cv)
    cv.add_argument("--side", choices=["source", "target"], required=True)
    cv.add_argument("--model-kind", choices=["mlm", "clm"], default="mlm")

    mp = sub.add_parser("mlm-probs", help="masked-word probabilities with priors")
    common(mp)
    mp.add_argument("--direction", choices=["mask_target", "mask_source", "both"],
                    default="both")

    cp = sub.add_parser("clm-probs", help="next-token probabilities with neutral priors")
    common(cp)
    cp.add_argument("--direction",
                    choices=["predict_target", "predict_source", "both"], default="both")

    rp = sub.add_parser("relation-probs", help="masked-relation candidate probabilities")
    common(rp)
    rp.add_argument("--template", required=True,
                    help="sentence with {src}, {rel} and {tgt} slots")
    rp.add_argument("--template-id", default="rel1")
    rp.add_argument("--candidates", required=True, help="comma-separated relation words")


    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ds = read_dataset(args.dataset)
        if args.command == "contextual":
            backend = LMBackend.load(args.model, args.model_kind, args.revision)
            words = ds["sources"] if args.side == "source" else ds["targets"]
            n = export_contextual_vectors(
                backend, words, battery_for(ds["relation"], args.side), args.out)
        elif args.command == "mlm-probs":
            backend = LMBackend.load(args.model, "mlm", args.revision)
            n = export_mlm_probs(backend, ds, args.direction, args.out)
        elif args.command == "clm-probs":
            backend = LMBackend.load(args.model, "clm", args.revision)
            n = export_clm_probs(backend, ds, args.direction, args.out)
        else:
            backend = LMBackend.load(args.model, "mlm", args.revision)
            pairs = [(s, t) for s in ds["sources"] for t in ds["targets"]]
            n = export_relation_probs(
                backend, pairs, [c.strip() for c in args.candidates.split(",") if c.strip()],
                args.template_id, args.template, args.out)
        print(f"wrote {n} records to {args.out}")
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())
