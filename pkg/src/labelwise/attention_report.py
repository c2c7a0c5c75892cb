"""Per-label attention reports for a single document.

For each requested label the document's tokens are written twice: as an
aligned ``token TAB weight`` text file and as a static HTML block whose
background intensity scales monotonically with weight, normalized to the
row maximum.  Requesting two labels shows how the same tokens are
weighted differently per label.
"""

from __future__ import annotations

import html
from pathlib import Path

import numpy as np

from . import model as md
from .errors import ArtifactError, LabelNotFoundError
from .preprocess import Vocabulary, file_checksum, pipeline
from .train import load_model


def attend(checkpoint_path: str | Path, vocab_path: str | Path, text: str,
           requested_labels: list[str], out_dir: str | Path) -> list[Path]:
    params, encoder, block, checksum = load_model(checkpoint_path)
    if file_checksum(vocab_path) != checksum:
        raise ArtifactError("checkpoint was trained against a different vocabulary file")
    vocab = Vocabulary.load(vocab_path)
    label_names = block["label_names"].split(",")
    name_to_index = {name: i for i, name in enumerate(label_names)}
    for name in requested_labels:
        if name not in name_to_index:
            raise LabelNotFoundError(
                f"label {name!r} not in checkpoint labels {label_names}"
            )

    tokens = pipeline(text)[: encoder.max_len]
    if not tokens:
        raise ArtifactError("document has no tokens after preprocessing")
    ids = np.asarray([vocab.encode(tokens)], dtype=np.intp)
    mask = np.ones_like(ids, dtype=bool)
    out = md.forward(ids, mask, params, encoder, train_mode=False)
    attention = out.attention.data[0]          # (L, n)
    probs = md.probabilities(out.logits).data[0]

    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    written = []
    rows = []
    for name in requested_labels:
        idx = name_to_index[name]
        weights = attention[idx]
        tsv = out_path / f"attn-{name}.tsv"
        with open(tsv, "w", encoding="utf-8") as fh:
            fh.write(f"# label {name}\tprobability {float(probs[idx])!r}\n")
            for tok, w in zip(tokens, weights):
                fh.write(f"{tok}\t{float(w)!r}\n")
        written.append(tsv)
        rows.append((name, float(probs[idx]), weights))

    html_path = out_path / "attention.html"
    html_path.write_text(_render_html(tokens, rows), encoding="utf-8")
    written.append(html_path)
    return written


def _render_html(tokens: list[str], rows) -> str:
    parts = [
        "<!doctype html>",
        "<html><head><meta charset='utf-8'><title>attention</title>",
        "<style>body{font-family:sans-serif;max-width:60em;margin:2em}"
        "span.tok{padding:1px 2px;border-radius:2px}</style></head><body>",
    ]
    for name, prob, weights in rows:
        top = float(np.max(weights))
        parts.append(f"<h3>label {html.escape(name)} &mdash; p = {prob:.4f}</h3><p>")
        spans = []
        for tok, w in zip(tokens, weights):
            alpha = 0.0 if top == 0.0 else float(w) / top
            spans.append(
                f"<span class='tok' style='background: rgba(220,40,40,{alpha:.4f})'"
                f" title='{float(w):.6f}'>{html.escape(tok)}</span>"
            )
        parts.append(" ".join(spans))
        parts.append("</p>")
    parts.append("</body></html>")
    return "\n".join(parts)
