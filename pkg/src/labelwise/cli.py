"""Command-line interface.

Subcommands: gen-synth, preprocess, embed, train, evaluate, attend,
report.  Exit code 0 on success; on a domain error one machine-readable
JSON line goes to stderr and the exit code is 1.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import embeddings as emb
from . import metrics as mt
from . import multiseed
from . import preprocess as pp
from . import synth
from .attention_report import attend
from .config import load_config
from .errors import ArtifactError, LabelwiseError
from .train import evaluate_checkpoint, train


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except LabelwiseError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelwise",
        description="Multi-label document classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic long-tailed corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--num-docs", type=int, default=2000)
    p.add_argument("--num-labels", type=int, default=10)
    p.add_argument("--vocab-noise-size", type=int, default=120)
    p.add_argument("--doc-len-min", type=int, default=20)
    p.add_argument("--doc-len-max", type=int, default=60)
    p.add_argument("--tail-decay", type=float, default=0.7)
    p.add_argument("--trigger-strength", type=float, default=0.9)
    p.add_argument("--base-rate", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_gen_synth)

    p = sub.add_parser("preprocess", help="tokenize corpora and build the vocabulary")
    p.add_argument("--train", required=True)
    p.add_argument("--valid")
    p.add_argument("--test")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_preprocess)

    p = sub.add_parser("embed", help="train CBOW embeddings on the tokenized corpus")
    p.add_argument("--vocab", required=True)
    p.add_argument("--train", required=True, help="tokenized training corpus")
    p.add_argument("--heldout", nargs="*", default=[],
                   help="extra tokenized corpora (only with --include-heldout)")
    p.add_argument("--include-heldout", action="store_true",
                   help="also train on the extra corpora text")
    p.add_argument("--out", required=True)
    p.add_argument("--d-e", type=int, default=128)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_embed)

    p = sub.add_parser("train", help="train a model from a config file")
    p.add_argument("--config", help="key = value config file")
    for flag in ("vocab", "embeddings", "train-corpus", "valid-corpus",
                 "labels", "out-dir", "loss"):
        p.add_argument(f"--{flag}")
    for flag in ("epochs", "batch-size", "seed", "layers", "heads",
                 "d-model", "max-len", "k"):
        p.add_argument(f"--{flag}", type=int)
    for flag in ("lr", "dropout", "C"):
        p.add_argument(f"--{flag}", type=float)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a checkpoint on a tokenized corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("attend", help="emit per-label attention reports for one document")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--vocab", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--text")
    group.add_argument("--text-file")
    p.add_argument("--labels", required=True, help="comma-separated label names")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_attend)

    p = sub.add_parser("report", help="aggregate multi-seed metrics into mean ± stdev")
    p.add_argument("--runs", nargs="+", required=True, help="metrics.json files")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_report)

    return parser


def cmd_gen_synth(args) -> int:
    spec = synth.SynthSpec(
        num_docs=args.num_docs,
        num_labels=args.num_labels,
        vocab_noise_size=args.vocab_noise_size,
        doc_len=(args.doc_len_min, args.doc_len_max),
        tail_decay=args.tail_decay,
        trigger_strength=args.trigger_strength,
        base_rate=args.base_rate,
        seed=args.seed,
    )
    corpus = synth.generate(spec)
    synth.write_corpus(corpus, args.out)
    print(f"wrote {len(corpus.train)}/{len(corpus.valid)}/{len(corpus.test)} "
          f"train/valid/test docs to {args.out}")
    return 0


def cmd_preprocess(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    splits = {"train": args.train}
    if args.valid:
        splits["valid"] = args.valid
    if args.test:
        splits["test"] = args.test

    tokenized = {}
    for split, path in splits.items():
        records = []
        for doc_id, labels, text in pp.read_raw_corpus(path):
            records.append((doc_id, labels, pp.pipeline(text)))
        tokenized[split] = records

    vocab = pp.Vocabulary.build(tokens for _, _, tokens in tokenized["train"])
    vocab.save(out / "vocab.txt")
    for split, records in tokenized.items():
        pp.write_tokenized_corpus(out / f"tokens-{split}.tsv", records)
    print(f"vocabulary of {len(vocab)} tokens; splits: "
          + ", ".join(f"{k}={len(v)}" for k, v in tokenized.items()))
    return 0


def cmd_embed(args) -> int:
    if args.heldout and not args.include_heldout:
        raise ArtifactError("--heldout corpora given without --include-heldout")
    vocab = pp.Vocabulary.load(args.vocab)
    checksum = pp.file_checksum(args.vocab)
    sources = [args.train] + (list(args.heldout) if args.include_heldout else [])
    streams = []
    for path in sources:
        for _, _, tokens in pp.read_tokenized_corpus(path):
            streams.append(vocab.encode(tokens))
    config = emb.CbowConfig(d_e=args.d_e, window=args.window,
                            negatives=args.negatives, epochs=args.epochs,
                            lr=args.lr)
    matrix = emb.train_cbow(streams, len(vocab), config, seed=args.seed)
    emb.save_embeddings(args.out, matrix, checksum)
    print(f"trained {matrix.shape[0]}x{matrix.shape[1]} embeddings on "
          f"{len(streams)} documents -> {args.out}")
    return 0


def cmd_train(args) -> int:
    overrides = {
        key: getattr(args, key.replace("-", "_"))
        for key in ("vocab", "embeddings", "train-corpus", "valid-corpus", "labels",
                    "out-dir", "loss", "epochs", "batch-size", "seed", "layers",
                    "heads", "d-model", "max-len", "k", "lr", "dropout", "C")
    }
    overrides = {k.replace("-", "_"): v for k, v in overrides.items() if v is not None}
    config = load_config(args.config, overrides)
    result = train(config)
    last = result.history[-1]
    print(f"trained {config.epochs} epochs; final valid micro-AUC "
          f"{last.report.auc_micro:.4f}; best checkpoint {result.best_path}")
    return 0


def cmd_evaluate(args) -> int:
    report = evaluate_checkpoint(args.checkpoint, args.corpus, args.vocab, args.k)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mt.write_report(report, out)
    print(report.to_text(), end="")
    return 0


def cmd_attend(args) -> int:
    text = args.text if args.text is not None else Path(args.text_file).read_text("utf-8")
    labels = [x for x in args.labels.split(",") if x]
    written = attend(args.checkpoint, args.vocab, text, labels, args.out)
    print("\n".join(str(p) for p in written))
    return 0


def cmd_report(args) -> int:
    reports = multiseed.load_reports(args.runs)
    summary = multiseed.aggregate(reports)
    multiseed.write_summary(summary, args.out)
    print((Path(args.out) / "summary.txt").read_text(encoding="utf-8"), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
