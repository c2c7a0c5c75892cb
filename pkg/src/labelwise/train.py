"""Training loop, evaluation passes, and epoch bookkeeping.

A run is fully determined by its config and seed: three independent RNG
streams (init, shuffling, dropout) are spawned from the seed, batches pad
to the longest document within the batch, and the best-validation-micro-AUC
and final parameter sets are checkpointed.  history.tsv holds only
deterministic fields; wall times go to timing.log so reruns stay
byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import checkpoint as ck
from . import metrics as mt
from . import model as md
from . import numerics as nm
from .config import RunConfig
from .errors import ArtifactError, DivergenceError
from .losses import LabelStats, bce_from_logits, ldam_loss
from .optim import Adam
from .preprocess import (
    PAD_ID,
    Document,
    Vocabulary,
    documents_from_tokenized,
    file_checksum,
    read_tokenized_corpus,
)
from .embeddings import load_embeddings
from .synth import read_labels


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    report: mt.MetricsReport
    wall_time: float


@dataclass
class TrainResult:
    best_path: Path
    final_path: Path
    history: list[EpochRecord]
    out_dir: Path


def make_batch(docs: list[Document], num_labels: int
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pad a batch to its own longest document; mask marks real tokens."""
    width = max(max((len(d.tokens) for d in docs), default=0), 1)
    ids = np.full((len(docs), width), PAD_ID, dtype=np.intp)
    mask = np.zeros((len(docs), width), dtype=bool)
    truth = np.zeros((len(docs), num_labels), dtype=np.float64)
    for i, doc in enumerate(docs):
        n = len(doc.tokens)
        ids[i, :n] = doc.tokens
        mask[i, :n] = True
        for label in doc.labels:
            truth[i, label] = 1.0
    return ids, mask, truth


def load_artifacts(config: RunConfig):
    for name in ("vocab", "embeddings", "train_corpus", "valid_corpus"):
        path = getattr(config, name)
        if not path or not Path(path).exists():
            raise ArtifactError(f"{name} file missing: {path!r}")
    vocab = Vocabulary.load(config.vocab)
    checksum = file_checksum(config.vocab)
    emb_matrix, emb_checksum = load_embeddings(config.embeddings)
    if emb_checksum != checksum:
        raise ArtifactError(
            "embeddings were trained against a different vocabulary "
            f"(checksum {emb_checksum[:12]}.. vs {checksum[:12]}..)"
        )
    if emb_matrix.shape[0] != len(vocab):
        raise ArtifactError(
            f"embedding rows {emb_matrix.shape[0]} != vocabulary size {len(vocab)}"
        )
    train_docs = documents_from_tokenized(
        read_tokenized_corpus(config.train_corpus), vocab, config.max_len)
    valid_docs = documents_from_tokenized(
        read_tokenized_corpus(config.valid_corpus), vocab, config.max_len)
    if config.labels:
        label_names = read_labels(config.labels)
    else:
        highest = -1
        for doc in train_docs + valid_docs:
            highest = max(highest, max(doc.labels, default=-1))
        label_names = [f"c{l:02d}" for l in range(highest + 1)]
    _check_label_range(train_docs + valid_docs, len(label_names))
    return vocab, checksum, emb_matrix, train_docs, valid_docs, label_names


def _check_label_range(docs: list[Document], num_labels: int) -> None:
    for doc in docs:
        for label in doc.labels:
            if not 0 <= label < num_labels:
                raise ArtifactError(
                    f"document {doc.id}: label {label} outside [0, {num_labels})"
                )


def predict_scores(params: md.ModelParams, docs: list[Document],
                   encoder: md.EncoderConfig, num_labels: int,
                   batch_size: int = 32) -> np.ndarray:
    scores = np.zeros((len(docs), num_labels))
    for start in range(0, len(docs), batch_size):
        chunk = docs[start: start + batch_size]
        ids, mask, _ = make_batch(chunk, num_labels)
        out = md.forward(ids, mask, params, encoder, train_mode=False)
        scores[start: start + len(chunk)] = md.probabilities(out.logits).data
    return scores


def evaluate_documents(params: md.ModelParams, docs: list[Document],
                       encoder: md.EncoderConfig, num_labels: int,
                       k: int) -> mt.MetricsReport:
    scores = predict_scores(params, docs, encoder, num_labels)
    truth = np.zeros((len(docs), num_labels), dtype=np.int64)
    for i, doc in enumerate(docs):
        for label in doc.labels:
            truth[i, label] = 1
    return mt.compute_report(scores, truth, k)


def _history_line(record: EpochRecord) -> str:
    r = record.report
    cells = [str(record.epoch), repr(float(record.train_loss))]
    cells += [repr(float(getattr(r, key))) for key in mt.MetricsReport.METRIC_KEYS]
    cells.append(str(r.k))
    return "\t".join(cells)


HISTORY_HEADER = "epoch\ttrain_loss\t" + "\t".join(mt.MetricsReport.METRIC_KEYS) + "\tk"


def _write_history(history: list[EpochRecord], out_dir: Path) -> None:
    lines = [HISTORY_HEADER] + [_history_line(rec) for rec in history]
    (out_dir / "history.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    timing = [f"{rec.epoch}\t{rec.wall_time:.3f}" for rec in history]
    (out_dir / "timing.log").write_text("\n".join(timing) + "\n", encoding="utf-8")


def _checkpoint_block(config: RunConfig, num_labels: int,
                      label_names: list[str]) -> dict[str, str]:
    block = {f.name: str(getattr(config, f.name)) for f in fields(RunConfig)
             if f.name not in ("vocab", "embeddings", "train_corpus",
                               "valid_corpus", "test_corpus", "labels", "out_dir")}
    block["num_labels"] = str(num_labels)
    block["label_names"] = ",".join(label_names)
    return block


def train(config: RunConfig) -> TrainResult:
    config.validate()
    vocab, checksum, emb_matrix, train_docs, valid_docs, label_names = load_artifacts(config)
    num_labels = len(label_names)
    if config.k > num_labels:
        raise ArtifactError(f"k={config.k} exceeds the {num_labels}-label space")
    encoder = config.encoder_config()
    if emb_matrix.shape[1] != config.d_model:
        raise ArtifactError(
            f"embedding width {emb_matrix.shape[1]} != d_model {config.d_model}"
        )

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    init_ss, shuffle_ss, dropout_ss = np.random.SeedSequence(config.seed).spawn(3)
    init_rng = np.random.default_rng(init_ss)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    dropout_rng = np.random.default_rng(dropout_ss)

    params = md.init_params(encoder, num_labels, emb_matrix, init_rng,
                            finetune_embeddings=config.finetune_embeddings)
    stats = LabelStats.from_documents(train_docs, num_labels, config.C)
    stats.save(out_dir / "label_stats.tsv")
    optimizer = Adam(params.named_parameters(), lr=config.lr)
    block = _checkpoint_block(config, num_labels, label_names)

    best_micro = -1.0
    best_path = out_dir / "checkpoint-best.bin"
    final_path = out_dir / "checkpoint-final.bin"
    history: list[EpochRecord] = []

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        order = shuffle_rng.permutation(len(train_docs))
        total_loss = 0.0
        for batch_idx, start in enumerate(range(0, len(order), config.batch_size)):
            chunk = [train_docs[i] for i in order[start: start + config.batch_size]]
            ids, mask, truth = make_batch(chunk, num_labels)
            with nm.Tape() as tape:
                out = md.forward(ids, mask, params, encoder,
                                 train_mode=True, rng=dropout_rng)
                if config.loss == "ldam":
                    loss = ldam_loss(truth, out.logits, stats)
                else:
                    loss = bce_from_logits(truth, out.logits)
            value = loss.item()
            if not np.isfinite(value):
                raise DivergenceError(epoch, batch_idx, value)
            total_loss += value * len(chunk)
            grads = tape.backward(loss)
            optimizer.step(grads)
            params.embeddings.data[PAD_ID] = 0.0

        report = evaluate_documents(params, valid_docs, encoder, num_labels, config.k)
        record = EpochRecord(
            epoch=epoch,
            train_loss=total_loss / max(len(train_docs), 1),
            report=report,
            wall_time=time.perf_counter() - started,
        )
        history.append(record)
        _write_history(history, out_dir)
        if report.auc_micro > best_micro:
            best_micro = report.auc_micro
            ck.save_checkpoint(best_path, params, block, checksum)

    ck.save_checkpoint(final_path, params, block, checksum)
    if not best_path.exists():  # defensive; first epoch always checkpoints
        ck.save_checkpoint(best_path, params, block, checksum)
    return TrainResult(best_path=best_path, final_path=final_path,
                       history=history, out_dir=out_dir)


def load_model(checkpoint_path: str | Path):
    """Rebuild (params, encoder_config, block, vocab_checksum) from disk."""
    arrays, block, checksum = ck.load_checkpoint(checkpoint_path)
    encoder = ck.encoder_config_from_block(block)
    params = ck.params_from_arrays(arrays, encoder.layers)
    return params, encoder, block, checksum


def evaluate_checkpoint(checkpoint_path: str | Path, corpus_path: str | Path,
                        vocab_path: str | Path, k: int | None = None) -> mt.MetricsReport:
    params, encoder, block, checksum = load_model(checkpoint_path)
    if file_checksum(vocab_path) != checksum:
        raise ArtifactError(
            "checkpoint was trained against a different vocabulary file"
        )
    vocab = Vocabulary.load(vocab_path)
    docs = documents_from_tokenized(
        read_tokenized_corpus(corpus_path), vocab, encoder.max_len)
    num_labels = int(block["num_labels"])
    _check_label_range(docs, num_labels)
    return evaluate_documents(params, docs, encoder, num_labels,
                              k if k is not None else int(block["k"]))
