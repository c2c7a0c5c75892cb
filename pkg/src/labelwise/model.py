"""The classifier network: embeddings -> transformer encoder -> per-label
attention -> per-label sigmoid heads.

Every token position gets a contextual vector from the encoder; each label
then computes its own softmax attention over those vectors, pools them
into one document vector per label, and scores it with that label's own
linear head.  PAD positions are masked out of both the encoder
self-attention and the label attention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .errors import ConfigError, DegenerateMaskError
from .numerics import Tensor


@dataclass
class EncoderConfig:
    layers: int = 2
    heads: int = 8
    d_model: int = 128
    d_ff: int = 0          # 0 -> 4 * d_model
    d_attn: int = 0        # 0 -> 2 * d_model
    dropout: float = 0.1
    max_len: int = 2500
    positional: bool = True
    per_label_heads: bool = True
    mask_pad: bool = True

    def __post_init__(self):
        if self.layers < 0:
            raise ConfigError(f"layers must be >= 0, got {self.layers}")
        if self.heads < 1 or self.d_model % self.heads:
            raise ConfigError(
                f"d_model {self.d_model} must be divisible by heads {self.heads}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.max_len < 1:
            raise ConfigError(f"max_len must be >= 1, got {self.max_len}")
        if self.d_ff == 0:
            self.d_ff = 4 * self.d_model
        if self.d_attn == 0:
            self.d_attn = 2 * self.d_model


@dataclass
class LayerParams:
    wq: Tensor
    bq: Tensor
    wk: Tensor
    bk: Tensor
    wv: Tensor
    bv: Tensor
    wo: Tensor
    bo: Tensor
    w1: Tensor
    b1: Tensor
    w2: Tensor
    b2: Tensor
    ln1_g: Tensor
    ln1_b: Tensor
    ln2_g: Tensor
    ln2_b: Tensor


@dataclass
class ModelParams:
    embeddings: Tensor
    layers: list[LayerParams]
    attn_u: Tensor
    attn_v: Tensor
    heads_z: Tensor
    heads_b: Tensor

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        out = [("embeddings", self.embeddings)]
        for i, lp in enumerate(self.layers):
            for name in ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo",
                         "w1", "b1", "w2", "b2", "ln1_g", "ln1_b", "ln2_g", "ln2_b"):
                out.append((f"enc{i}.{name}", getattr(lp, name)))
        out.extend([
            ("attn_u", self.attn_u),
            ("attn_v", self.attn_v),
            ("heads_z", self.heads_z),
            ("heads_b", self.heads_b),
        ])
        return out

    def all_finite(self) -> bool:
        return all(np.isfinite(t.data).all() for _, t in self.named_parameters())


def _xavier(rng: np.random.Generator, fan_in: int, fan_out: int,
            shape: tuple[int, ...]) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_params(config: EncoderConfig, num_labels: int,
                emb_matrix: np.ndarray, rng: np.random.Generator,
                finetune_embeddings: bool = True) -> ModelParams:
    if emb_matrix.shape[1] != config.d_model:
        raise ConfigError(
            f"embedding width {emb_matrix.shape[1]} != d_model {config.d_model}"
        )
    d, d_ff, d_a = config.d_model, config.d_ff, config.d_attn
    layers = []
    for _ in range(config.layers):
        layers.append(LayerParams(
            wq=Tensor(_xavier(rng, d, d, (d, d)), True),
            bq=Tensor(np.zeros(d), True),
            wk=Tensor(_xavier(rng, d, d, (d, d)), True),
            bk=Tensor(np.zeros(d), True),
            wv=Tensor(_xavier(rng, d, d, (d, d)), True),
            bv=Tensor(np.zeros(d), True),
            wo=Tensor(_xavier(rng, d, d, (d, d)), True),
            bo=Tensor(np.zeros(d), True),
            w1=Tensor(_xavier(rng, d, d_ff, (d, d_ff)), True),
            b1=Tensor(np.zeros(d_ff), True),
            w2=Tensor(_xavier(rng, d_ff, d, (d_ff, d)), True),
            b2=Tensor(np.zeros(d), True),
            ln1_g=Tensor(np.ones(d), True),
            ln1_b=Tensor(np.zeros(d), True),
            ln2_g=Tensor(np.ones(d), True),
            ln2_b=Tensor(np.zeros(d), True),
        ))
    l_rows = num_labels if config.per_label_heads else 1
    return ModelParams(
        embeddings=Tensor(emb_matrix.copy(), finetune_embeddings),
        layers=layers,
        attn_u=Tensor(_xavier(rng, d, d_a, (d, d_a)), True),
        attn_v=Tensor(_xavier(rng, d_a, num_labels, (num_labels, d_a)), True),
        heads_z=Tensor(_xavier(rng, d, 1, (l_rows, d)), True),
        heads_b=Tensor(np.zeros(l_rows), True),
    )


def positional_encoding(n: int, d: int) -> np.ndarray:
    pos = np.arange(n)[:, None]
    i = np.arange(0, d, 2)[None, :]
    angles = pos / np.power(10000.0, i / d)
    pe = np.zeros((n, d))
    pe[:, 0::2] = np.sin(angles)
    pe[:, 1::2] = np.cos(angles[:, : d // 2])
    return pe


@dataclass
class ForwardOutput:
    logits: Tensor      # (batch, L)
    attention: Tensor   # (batch, L, n)
    doc_reps: Tensor    # (batch, L, d_h)


def encode(ids: np.ndarray, pad_mask: np.ndarray, params: ModelParams,
           config: EncoderConfig, train_mode: bool = False,
           rng: np.random.Generator | None = None) -> Tensor:
    """Contextualize a (batch, n) id matrix into (batch, n, d_model)."""
    ids = np.asarray(ids, dtype=np.intp)
    pad_mask = np.asarray(pad_mask, dtype=bool)
    batch, n = ids.shape
    if n > config.max_len:
        raise ConfigError(f"sequence length {n} exceeds max_len {config.max_len}")
    if params.embeddings.shape[1] != config.d_model:
        raise ConfigError(
            f"embedding width {params.embeddings.shape[1]} != d_model {config.d_model}"
        )
    drop = config.dropout if train_mode else 0.0
    if drop and rng is None:
        raise ValueError("training-mode dropout needs an rng")

    x = nm.embedding_lookup(params.embeddings, ids)
    if config.positional:
        x = nm.add(x, Tensor(positional_encoding(n, config.d_model)))
    if drop:
        x = nm.dropout(x, drop, rng)

    heads, d = config.heads, config.d_model
    dk = d // heads
    key_mask = None
    if config.mask_pad:
        key_mask = np.repeat(pad_mask, heads, axis=0)[:, None, :]  # (B*h, 1, n)

    for lp in params.layers:
        q = _fold_heads(nm.add(nm.matmul(x, lp.wq), lp.bq), batch, n, heads, dk)
        k = _fold_heads(nm.add(nm.matmul(x, lp.wk), lp.bk), batch, n, heads, dk)
        v = _fold_heads(nm.add(nm.matmul(x, lp.wv), lp.bv), batch, n, heads, dk)
        scores = nm.scale(nm.matmul(q, nm.transpose(k, (0, 2, 1))), 1.0 / math.sqrt(dk))
        attn = nm.softmax(scores, mask=key_mask)
        ctx = _unfold_heads(nm.matmul(attn, v), batch, n, heads, dk)
        out = nm.add(nm.matmul(ctx, lp.wo), lp.bo)
        if drop:
            out = nm.dropout(out, drop, rng)
        x = nm.layer_norm(nm.add(x, out), lp.ln1_g, lp.ln1_b)

        ff = nm.matmul(nm.relu(nm.add(nm.matmul(x, lp.w1), lp.b1)), lp.w2)
        ff = nm.add(ff, lp.b2)
        if drop:
            ff = nm.dropout(ff, drop, rng)
        x = nm.layer_norm(nm.add(x, ff), lp.ln2_g, lp.ln2_b)
    return x


def _fold_heads(x: Tensor, batch: int, n: int, heads: int, dk: int) -> Tensor:
    # (B, n, d) -> (B*heads, n, dk)
    x = nm.reshape(x, (batch, n, heads, dk))
    x = nm.transpose(x, (0, 2, 1, 3))
    return nm.reshape(x, (batch * heads, n, dk))


def _unfold_heads(x: Tensor, batch: int, n: int, heads: int, dk: int) -> Tensor:
    x = nm.reshape(x, (batch, heads, n, dk))
    x = nm.transpose(x, (0, 2, 1, 3))
    return nm.reshape(x, (batch, n, heads * dk))


def label_attention(h: Tensor, pad_mask: np.ndarray | None,
                    attn_u: Tensor, attn_v: Tensor) -> tuple[Tensor, Tensor]:
    """Per-label attention rows and pooled document vectors.

    ``h`` is (n, d_h) or (batch, n, d_h); returns (A, C) of shapes
    (L, n)/(L, d_h), batched accordingly.  Attention rows are softmax over
    unmasked positions only.
    """
    single = h.ndim == 2
    if single:
        h = nm.reshape(h, (1,) + h.shape)
    batch, n, _ = h.shape
    if pad_mask is not None:
        pad_mask = np.asarray(pad_mask, dtype=bool).reshape(batch, 1, n)
        if not pad_mask.any(axis=-1).all():
            raise DegenerateMaskError("label attention over an all-PAD document")
    scores = nm.matmul(nm.tanh(nm.matmul(h, attn_u)), nm.transpose(attn_v))  # (B, n, L)
    scores = nm.transpose(scores, (0, 2, 1))  # (B, L, n)
    attn = nm.softmax(scores, mask=pad_mask)
    pooled = nm.matmul(attn, h)  # (B, L, d_h)
    if single:
        attn = nm.reshape(attn, attn.shape[1:])
        pooled = nm.reshape(pooled, pooled.shape[1:])
    return attn, pooled


def classify(pooled: Tensor, heads_z: Tensor, heads_b: Tensor) -> Tensor:
    """logit_l = z_l . c_l + b_l  (shared z/b broadcast when configured)."""
    return nm.add(nm.reduce_sum(nm.mul(pooled, heads_z), axis=-1), heads_b)


def probabilities(logits: Tensor) -> Tensor:
    return nm.sigmoid(logits)


def predictions(probs: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Hard 0/1 calls; a probability exactly at threshold counts positive."""
    return (np.asarray(probs) >= threshold).astype(np.int64)


def forward(ids: np.ndarray, pad_mask: np.ndarray, params: ModelParams,
            config: EncoderConfig, train_mode: bool = False,
            rng: np.random.Generator | None = None) -> ForwardOutput:
    if np.size(ids) == 0:
        raise ValueError("forward() needs a non-empty batch")
    h = encode(ids, pad_mask, params, config, train_mode, rng)
    mask = pad_mask if config.mask_pad else None
    attn, pooled = label_attention(h, mask, params.attn_u, params.attn_v)
    logits = classify(pooled, params.heads_z, params.heads_b)
    return ForwardOutput(logits=logits, attention=attn, doc_reps=pooled)
