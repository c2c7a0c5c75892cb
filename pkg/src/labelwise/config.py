"""Run configuration: a flat key = value file, overridable by CLI flags.

Unknown keys are rejected outright; values are coerced to the declared
field types before any work starts.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .model import EncoderConfig


@dataclass
class RunConfig:
    # architecture
    layers: int = 2
    heads: int = 8
    d_model: int = 128
    d_ff: int = 0
    d_attn: int = 0
    dropout: float = 0.1
    max_len: int = 2500
    positional: bool = True
    per_label_heads: bool = True
    mask_pad: bool = True
    finetune_embeddings: bool = True
    # training
    lr: float = 0.001
    epochs: int = 30
    batch_size: int = 8
    loss: str = "bce"
    C: float = 3.0
    k: int = 5
    seed: int = 0
    # artifacts
    vocab: str = ""
    embeddings: str = ""
    train_corpus: str = ""
    valid_corpus: str = ""
    test_corpus: str = ""
    labels: str = ""
    out_dir: str = "run"

    def validate(self) -> None:
        if self.loss not in ("bce", "ldam"):
            raise ConfigError(f"loss must be 'bce' or 'ldam', got {self.loss!r}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.C < 0:
            raise ConfigError(f"C must be >= 0, got {self.C}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        self.encoder_config()  # architecture validation

    def encoder_config(self) -> EncoderConfig:
        return EncoderConfig(
            layers=self.layers, heads=self.heads, d_model=self.d_model,
            d_ff=self.d_ff, d_attn=self.d_attn, dropout=self.dropout,
            max_len=self.max_len, positional=self.positional,
            per_label_heads=self.per_label_heads, mask_pad=self.mask_pad,
        )


_FIELDS = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    target = _FIELDS[key]
    raw = raw.strip()
    if target == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if target == "int":
            return int(raw)
        if target == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {target}, got {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(encoding="utf-8")))
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, str(val)) if isinstance(val, str) else val
    config = RunConfig(**values)
    config.validate()
    return config


def config_as_lines(config: RunConfig) -> str:
    parts = []
    for f in fields(RunConfig):
        parts.append(f"{f.name} = {getattr(config, f.name)}")
    return "\n".join(parts) + "\n"
