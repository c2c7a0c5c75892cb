"""CBOW word embeddings with negative sampling.

The mean of the context word vectors predicts the center word against a
handful of noise words drawn from the unigram^(3/4) distribution.  The
PAD row (index 0) is zero and never updated.  Training is single-threaded
and fully determined by the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numerics as nm
from .errors import ArtifactError, InsufficientVocabularyError
from .preprocess import PAD_ID

_EMB_MAGIC = "EMB v1"


@dataclass(frozen=True)
class CbowConfig:
    d_e: int = 128
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    min_lr_fraction: float = 1e-4  # linear decay floor as a fraction of lr


def train_cbow(id_streams: list[list[int]], vocab_size: int,
               config: CbowConfig, seed: int) -> np.ndarray:
    """Train a (vocab_size, d_e) embedding matrix on encoded token streams."""
    if config.window < 1:
        raise ValueError(f"window must be >= 1, got {config.window}")
    if config.negatives < 1:
        raise ValueError(f"negatives must be >= 1, got {config.negatives}")
    streams = [s for s in id_streams if s]
    if not streams:
        raise ArtifactError("cannot train embeddings on an empty corpus")
    if vocab_size < config.negatives + 1:
        raise InsufficientVocabularyError(
            f"vocabulary of {vocab_size} cannot support {config.negatives} negatives"
        )

    rng = np.random.default_rng(seed)
    d = config.d_e
    w_in = (rng.random((vocab_size, d)) - 0.5) / d
    w_out = np.zeros((vocab_size, d))
    w_in[PAD_ID] = 0.0

    noise_cdf = _noise_cdf(streams, vocab_size)

    total = config.epochs * sum(len(s) for s in streams)
    processed = 0
    k = config.negatives
    for _ in range(config.epochs):
        for stream in streams:
            ids = np.asarray(stream, dtype=np.intp)
            n = len(ids)
            # per-center dynamic window and negative draws, batched per stream
            shrink = rng.integers(1, config.window + 1, size=n)
            negs = np.searchsorted(noise_cdf, rng.random((n, k)))
            for i in range(n):
                alpha = config.lr * max(
                    1.0 - processed / (total + 1), config.min_lr_fraction
                )
                processed += 1
                b = shrink[i]
                lo, hi = max(0, i - b), min(n, i + b + 1)
                if hi - lo <= 1:
                    continue
                context = np.concatenate((ids[lo:i], ids[i + 1: hi]))
                h = w_in[context].mean(axis=0)

                center = ids[i]
                grad_h = np.zeros(d)
                targets = [(center, 1.0)]
                targets.extend((t, 0.0) for t in negs[i] if t != center)
                for t, label in targets:
                    f = 1.0 / (1.0 + np.exp(-np.dot(h, w_out[t])))
                    g = (label - f) * alpha
                    grad_h += g * w_out[t]
                    w_out[t] += g * h
                w_in[context] += grad_h / len(context)

    w_in[PAD_ID] = 0.0
    return w_in


def _noise_cdf(streams: list[list[int]], vocab_size: int) -> np.ndarray:
    counts = np.zeros(vocab_size)
    for stream in streams:
        np.add.at(counts, np.asarray(stream, dtype=np.intp), 1.0)
    counts[PAD_ID] = 0.0
    weights = counts ** 0.75
    total = weights.sum()
    if total == 0.0:
        raise ArtifactError("no trainable tokens in the corpus")
    return np.cumsum(weights / total)


def lookup(ids, matrix: np.ndarray) -> nm.Tensor:
    """Row-gather as a Tensor; PAD rows come back as zero vectors."""
    return nm.embedding_lookup(nm.Tensor(matrix), np.asarray(ids, dtype=np.intp))


def cbow_pair_loss_and_grads(h_context: np.ndarray, out_vec: np.ndarray,
                             label: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss and analytic gradients for a single (context mean, target) pair.

    Exposed for gradient verification: loss = -log sigma(s) for a positive
    target and -log sigma(-s) for a noise target with s = h . v.
    """
    s = float(np.dot(h_context, out_vec))
    f = 1.0 / (1.0 + np.exp(-s))
    loss = -np.log(f) if label == 1.0 else -np.log(1.0 - f)
    d_s = f - label
    return loss, d_s * out_vec, d_s * h_context


def save_embeddings(path: str | Path, matrix: np.ndarray, vocab_checksum: str) -> None:
    v, d = matrix.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_EMB_MAGIC} {v} {d} {vocab_checksum}\n")
        for row in matrix:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def load_embeddings(path: str | Path) -> tuple[np.ndarray, str]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 5 or " ".join(header[:2]) != _EMB_MAGIC:
            raise ArtifactError(f"{path}: not a v1 embedding file")
        v, d, checksum = int(header[2]), int(header[3]), header[4]
        matrix = np.loadtxt(fh, dtype=np.float64).reshape(v, d)
    return matrix, checksum
