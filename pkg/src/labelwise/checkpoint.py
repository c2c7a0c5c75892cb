"""Versioned binary checkpoint container.

Byte layout (all integers little-endian, floats IEEE-754 binary64):

    offset  size        field
    0       8           magic b"LWCK0001"
    8       4           u32 config length -> UTF-8 "key = value" lines
    .       4           u32 checksum length -> hex sha256 of the vocabulary file
    .       4           u32 number of parameter blocks
    per block:
            2           u16 name length, then name UTF-8
            1           u8 rank
            8 * rank    u64 extents
            8 * prod    row-major float64 values

Any implementation that honors this layout can reload the model.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ArtifactError
from .model import EncoderConfig, LayerParams, ModelParams
from .numerics import Tensor

MAGIC = b"LWCK0001"


def save_checkpoint(path: str | Path, params: ModelParams,
                    config_block: dict[str, str], vocab_checksum: str) -> None:
    blocks = params.named_parameters()
    config_bytes = "\n".join(f"{k} = {v}" for k, v in config_block.items()).encode("utf-8")
    checksum_bytes = vocab_checksum.encode("ascii")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(config_bytes)))
        fh.write(config_bytes)
        fh.write(struct.pack("<I", len(checksum_bytes)))
        fh.write(checksum_bytes)
        fh.write(struct.pack("<I", len(blocks)))
        for name, tensor in blocks:
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            arr = np.ascontiguousarray(tensor.data, dtype="<f8")
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def load_checkpoint(path: str | Path) -> tuple[dict[str, np.ndarray], dict[str, str], str]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ArtifactError(f"{path}: bad checkpoint magic")
    off = 8

    def take(n: int) -> bytes:
        nonlocal off
        if off + n > len(data):
            raise ArtifactError(f"{path}: truncated checkpoint")
        chunk = data[off: off + n]
        off += n
        return chunk

    config_len = struct.unpack("<I", take(4))[0]
    config = {}
    for line in take(config_len).decode("utf-8").splitlines():
        key, _, val = line.partition(" = ")
        config[key] = val
    checksum_len = struct.unpack("<I", take(4))[0]
    checksum = take(checksum_len).decode("ascii")
    n_blocks = struct.unpack("<I", take(4))[0]
    arrays: dict[str, np.ndarray] = {}
    for _ in range(n_blocks):
        name_len = struct.unpack("<H", take(2))[0]
        name = take(name_len).decode("utf-8")
        rank = struct.unpack("<B", take(1))[0]
        shape = struct.unpack(f"<{rank}Q", take(8 * rank)) if rank else ()
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(take(8 * count), dtype="<f8").reshape(shape).copy()
        arrays[name] = arr
    if off != len(data):
        raise ArtifactError(f"{path}: {len(data) - off} trailing bytes")
    return arrays, config, checksum


def params_from_arrays(arrays: dict[str, np.ndarray], layers: int,
                       finetune_embeddings: bool = True) -> ModelParams:
    def tensor(name: str) -> Tensor:
        if name not in arrays:
            raise ArtifactError(f"checkpoint is missing parameter {name!r}")
        trainable = finetune_embeddings if name == "embeddings" else True
        return Tensor(arrays[name], requires_grad=trainable)

    layer_params = []
    for i in range(layers):
        kwargs = {
            field: tensor(f"enc{i}.{field}")
            for field in ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo",
                          "w1", "b1", "w2", "b2", "ln1_g", "ln1_b", "ln2_g", "ln2_b")
        }
        layer_params.append(LayerParams(**kwargs))
    return ModelParams(
        embeddings=tensor("embeddings"),
        layers=layer_params,
        attn_u=tensor("attn_u"),
        attn_v=tensor("attn_v"),
        heads_z=tensor("heads_z"),
        heads_b=tensor("heads_b"),
    )


def encoder_config_from_block(block: dict[str, str]) -> EncoderConfig:
    return EncoderConfig(
        layers=int(block["layers"]),
        heads=int(block["heads"]),
        d_model=int(block["d_model"]),
        d_ff=int(block["d_ff"]),
        d_attn=int(block["d_attn"]),
        dropout=float(block["dropout"]),
        max_len=int(block["max_len"]),
        positional=block["positional"] == "True",
        per_label_heads=block["per_label_heads"] == "True",
        mask_pad=block["mask_pad"] == "True",
    )
