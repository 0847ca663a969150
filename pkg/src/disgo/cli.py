"""Command-line entry point.

Subcommands: e2e, detection, recognition, grouping, bleu (evaluation
modes) and synth (synthetic prediction generation). Exit codes: 0 success,
1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .evaluate import EvalConfig, evaluate_corpus
from .fixtures import PerturbSpec, perturb
from .io_formats import (
    SCHEMA_VERSION,
    SchemaError,
    emit_report,
    parse_ground_truth,
    parse_predictions,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str | None, payload: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.write(payload.decode("utf-8"))
    else:
        with open(path, "wb") as fh:
            fh.write(payload)


def _default_jobs() -> int:
    env = os.environ.get("DISGO_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _add_eval_parser(sub, mode: str, help_text: str) -> None:
    p = sub.add_parser(mode, help=help_text)
    p.add_argument("--gt", required=True, help="ground-truth file ('-' for stdin)")
    p.add_argument("--pred", required=True, help="prediction file ('-' for stdin)")
    p.add_argument("--epsilon", type=float, default=None,
                   help="IoU threshold (default 1e-5; 0.5 in detection mode)")
    p.add_argument("--case-fold", action="store_true",
                   help="compare spellings case-insensitively")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip Unicode NFC normalization")
    p.add_argument("--textual-fallback", action="store_true",
                   help="align on spellings instead of boxes (approximate)")
    p.add_argument("--max-ref-combos", type=int, default=256,
                   help="cap on the reference translation cross-product")
    p.add_argument("--jobs", type=int, default=_default_jobs(),
                   help="parallel image workers (env DISGO_JOBS)")
    p.add_argument("--format", choices=("machine", "text"), default="text")
    p.add_argument("--output", default=None, help="report path (default stdout)")
    p.set_defaults(run=_run_eval, mode=mode)


def _run_eval(args) -> int:
    try:
        gt = parse_ground_truth(_read(args.gt))
        pred = parse_predictions(_read(args.pred))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SchemaError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    config = EvalConfig(mode=args.mode, epsilon=args.epsilon,
                        case_fold=args.case_fold,
                        normalize=not args.no_normalize,
                        textual_fallback=args.textual_fallback,
                        max_ref_combos=args.max_ref_combos,
                        jobs=max(1, args.jobs))
    try:
        report = evaluate_corpus(gt, pred, config)
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        _write(args.output, emit_report(report, format=args.format))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _run_synth(args) -> int:
    try:
        gt = parse_ground_truth(_read(args.gt))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SchemaError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    spec = PerturbSpec(del_rate=args.del_rate, ins_rate=args.ins_rate,
                       sub_rate=args.sub_rate, shuffle_blocks=args.shuffle_blocks,
                       split_blocks=args.split_blocks, seed=args.seed)
    images = []
    try:
        for img in gt:
            pred, warnings = perturb(img, spec)
            for w in warnings:
                print(f"warning: {w}", file=sys.stderr)
            images.append({
                "image_id": pred.image_id,
                "words": [
                    {"text": w.text,
                     "box": {"cx": w.box.cx, "cy": w.box.cy, "w": w.box.w,
                             "h": w.box.h, "theta_deg": w.box.theta}}
                    for w in pred.words
                ],
                "blocks": [list(b) for b in pred.blocks],
            })
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    doc = {"schema_version": SCHEMA_VERSION, "images": images}
    payload = (json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2)
               + "\n").encode("utf-8")
    try:
        _write(args.output, payload)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disgo",
        description="Scene-text OCR evaluation: DISGO word error rates and "
                    "superblock BLEU.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_eval_parser(sub, "e2e", "end-to-end DISGO WER")
    _add_eval_parser(sub, "detection", "detection WER: (D+I)/G at IoU 0.5")
    _add_eval_parser(sub, "recognition", "recognition WER: (S+D)/G on GT boxes")
    _add_eval_parser(sub, "grouping", "grouping/ordering WER: GO/G")
    _add_eval_parser(sub, "bleu", "superblock BLEU over MT outputs")

    p = sub.add_parser("synth", help="generate a corrupted prediction file")
    p.add_argument("--gt", required=True)
    p.add_argument("--del-rate", type=float, default=0.0)
    p.add_argument("--ins-rate", type=float, default=0.0)
    p.add_argument("--sub-rate", type=float, default=0.0)
    p.add_argument("--shuffle-blocks", action="store_true")
    p.add_argument("--split-blocks", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(run=_run_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
