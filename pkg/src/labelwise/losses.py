"""Multi-label training losses.

Binary cross-entropy sums over labels for each document and averages over
documents.  The margin variant subtracts a per-label margin from the
logits of true labels before the sigmoid, with margin_l = C / n_l^(1/4)
from the label's positive-document count in the training split; C = 0
reduces it to plain BCE exactly.  Margins apply only during training;
inference uses plain sigmoid probabilities with the 0.5 threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numerics as nm
from .errors import DimensionError
from .numerics import Tensor

PROB_EPS = 1e-12


@dataclass(frozen=True)
class LabelStats:
    counts: np.ndarray    # positive training-document count per label
    C: float
    margins: np.ndarray   # C / max(count, 1)^(1/4)

    @classmethod
    def from_counts(cls, counts, C: float) -> "LabelStats":
        counts = np.asarray(counts, dtype=np.float64)
        return cls(counts=counts, C=float(C), margins=ldam_margins(counts, C))

    @classmethod
    def from_documents(cls, documents, num_labels: int, C: float) -> "LabelStats":
        counts = np.zeros(num_labels)
        for doc in documents:
            for label in doc.labels:
                counts[label] += 1
        return cls.from_counts(counts, C)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for i, (n, m) in enumerate(zip(self.counts, self.margins)):
                fh.write(f"{i}\t{int(n)}\t{repr(float(m))}\n")

    @classmethod
    def load(cls, path: str | Path, C: float) -> "LabelStats":
        counts = [float(line.split("\t")[1])
                  for line in Path(path).read_text(encoding="utf-8").splitlines()]
        return cls.from_counts(np.asarray(counts), C)


def ldam_margins(counts, C: float) -> np.ndarray:
    """margin_l = C / n_l^(1/4), with zero counts floored at one.

    The fourth root is sqrt(sqrt(n)): correctly rounded twice, so perfect
    fourth powers give exact margins (81 -> exactly 3).
    """
    counts = np.asarray(counts, dtype=np.float64)
    if (counts < 0).any():
        raise ValueError("label counts must be non-negative")
    if C < 0:
        raise ValueError(f"margin constant must be >= 0, got {C}")
    return C / np.sqrt(np.sqrt(np.maximum(counts, 1.0)))


def bce(y: np.ndarray, probs: Tensor) -> Tensor:
    """-sum_l [y log p + (1-y) log(1-p)], then mean over any batch axis.

    ``y`` is a binary array matching ``probs`` in shape; probabilities are
    clamped to [eps, 1-eps] before the logs.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != probs.shape:
        raise DimensionError(f"bce: truth {y.shape} vs probs {probs.shape}")
    p = nm.clamp(probs, PROB_EPS, 1.0 - PROB_EPS)
    per_entry = nm.add(
        nm.mul(Tensor(y), nm.log(p)),
        nm.mul(Tensor(1.0 - y), nm.log(nm.affine(p, -1.0, 1.0))),
    )
    per_doc = nm.scale(nm.reduce_sum(per_entry, axis=-1), -1.0)
    if per_doc.ndim == 0:
        return per_doc
    return nm.reduce_mean(per_doc)


def ldam_loss(y: np.ndarray, logits: Tensor, stats: LabelStats) -> Tensor:
    """BCE on sigmoid(logits - margin_l * 1[y_l = 1])."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != logits.shape:
        raise DimensionError(f"ldam: truth {y.shape} vs logits {logits.shape}")
    adjusted = nm.sub(logits, Tensor(y * stats.margins))
    return bce(y, nm.sigmoid(adjusted))


def bce_from_logits(y: np.ndarray, logits: Tensor) -> Tensor:
    return bce(y, nm.sigmoid(logits))
