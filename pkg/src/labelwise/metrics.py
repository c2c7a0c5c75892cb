"""Ranking and classification metrics over a score matrix.

AUC uses the rank-sum (Mann-Whitney) form with midrank tie handling.
Macro averages go over labels (AUC skips labels whose truth is
single-class and reports them; F1 counts every label, 0/0 = 0).  Micro
pools all (document, label) cells.  P@k averages per-document top-k hit
fractions, breaking score ties at the boundary by ascending label index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import UndefinedAUCError


@dataclass(frozen=True)
class MetricsReport:
    auc_macro: float
    auc_micro: float
    f1_macro: float
    f1_micro: float
    p_at_k: float
    k: int
    skipped_labels: tuple[int, ...] = field(default=())

    METRIC_KEYS = ("auc_macro", "auc_micro", "f1_macro", "f1_micro", "p_at_k")

    def to_dict(self) -> dict:
        return {
            "auc_macro": self.auc_macro,
            "auc_micro": self.auc_micro,
            "f1_macro": self.f1_macro,
            "f1_micro": self.f1_micro,
            "p_at_k": self.p_at_k,
            "k": self.k,
            "skipped_labels": list(self.skipped_labels),
        }

    def to_text(self) -> str:
        lines = [f"{key}\t{self.to_dict()[key]!r}" for key in self.METRIC_KEYS]
        lines.append(f"k\t{self.k}")
        lines.append(f"skipped_labels\t{','.join(map(str, self.skipped_labels))}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        d = json.loads(text)
        return cls(
            auc_macro=d["auc_macro"], auc_micro=d["auc_micro"],
            f1_macro=d["f1_macro"], f1_micro=d["f1_micro"],
            p_at_k=d["p_at_k"], k=d["k"],
            skipped_labels=tuple(d["skipped_labels"]),
        )


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i: j + 1]] = 0.5 * (i + j) + 1.0  # average of ranks i+1..j+1
        i = j + 1
    return ranks


def auc_binary(scores: np.ndarray, truth: np.ndarray) -> float:
    """P(score_pos > score_neg) + 0.5 P(equal) via midranks."""
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    truth = np.asarray(truth).reshape(-1)
    n_pos = int((truth == 1).sum())
    n_neg = int((truth == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedAUCError("AUC needs at least one positive and one negative")
    ranks = _midranks(scores)
    rank_sum = float(ranks[truth == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def macro_micro_auc(scores: np.ndarray, truth: np.ndarray
                    ) -> tuple[float, float, list[int]]:
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.size == 0:
        raise UndefinedAUCError("empty score matrix")
    per_label = []
    skipped = []
    for label in range(scores.shape[1]):
        try:
            per_label.append(auc_binary(scores[:, label], truth[:, label]))
        except UndefinedAUCError:
            skipped.append(label)
    if not per_label:
        raise UndefinedAUCError("every label has single-class truth")
    macro = float(np.mean(per_label))
    micro = auc_binary(scores.reshape(-1), truth.reshape(-1))
    return macro, micro, skipped


def f1_binary(pred: np.ndarray, truth: np.ndarray) -> float:
    tp = int(((pred == 1) & (truth == 1)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


def macro_micro_f1(scores: np.ndarray, truth: np.ndarray,
                   threshold: float = 0.5) -> tuple[float, float]:
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    pred = (scores >= threshold).astype(np.int64)
    per_label = [f1_binary(pred[:, l], truth[:, l]) for l in range(scores.shape[1])]
    macro = float(np.mean(per_label))
    micro = f1_binary(pred.reshape(-1), truth.reshape(-1))
    return macro, micro


def precision_at_k(scores: np.ndarray, truth: np.ndarray, k: int) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    n_docs, n_labels = scores.shape
    if not 1 <= k <= n_labels:
        raise ValueError(f"k must be in [1, {n_labels}], got {k}")
    total = 0.0
    for i in range(n_docs):
        # primary key: score descending; tie-break: label index ascending
        order = np.lexsort((np.arange(n_labels), -scores[i]))
        total += float(truth[i, order[:k]].sum()) / k
    return total / n_docs


def compute_report(scores: np.ndarray, truth: np.ndarray, k: int) -> MetricsReport:
    auc_ma, auc_mi, skipped = macro_micro_auc(scores, truth)
    f1_ma, f1_mi = macro_micro_f1(scores, truth)
    return MetricsReport(
        auc_macro=auc_ma, auc_micro=auc_mi,
        f1_macro=f1_ma, f1_micro=f1_mi,
        p_at_k=precision_at_k(scores, truth, k), k=k,
        skipped_labels=tuple(skipped),
    )


def write_report(report: MetricsReport, out_dir: str | Path, stem: str = "metrics") -> None:
    out = Path(out_dir)
    (out / f"{stem}.txt").write_text(report.to_text(), encoding="utf-8")
    (out / f"{stem}.json").write_text(report.to_json() + "\n", encoding="utf-8")
