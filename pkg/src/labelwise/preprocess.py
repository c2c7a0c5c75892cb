"""Text-to-token pipeline, vocabulary, and corpus file handling.

Pipeline stages, in order: lowercase, tokenize (punctuation becomes
whitespace), drop pure-digit tokens, drop stopwords, drop tokens shorter
than three characters, stem, mask remaining digits with ``n``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import stemmer
from .errors import ArtifactError, EmptyCorpusError

PAD_TOKEN = "PAD"
UNK_TOKEN = "UNK"
PAD_ID = 0
UNK_ID = 1

_VOCAB_HEADER = "VOCAB v1 reserved=PAD:0,UNK:1"


def load_stopwords() -> frozenset[str]:
    text = resources.files("labelwise.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class PrepConfig:
    min_token_len: int = 3
    digit_mask: str = "n"
    stopwords: frozenset[str] = field(default_factory=load_stopwords)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace after turning punctuation
    (anything neither alphanumeric nor whitespace) into spaces."""
    out = []
    for ch in text.lower():
        if ch.isalnum():
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out).split()


def pipeline(text: str, config: PrepConfig | None = None) -> list[str]:
    config = config or _DEFAULT_CONFIG
    tokens = tokenize(text)
    kept = []
    for tok in tokens:
        if tok.isdigit():
            continue  # standalone numbers are deleted, not masked
        if tok in config.stopwords:
            continue
        if len(tok) < config.min_token_len:
            continue
        kept.append(tok)
    out = []
    for tok in kept:
        stem = stemmer.stem(tok)
        # a stem can come out shorter than its word ("aas" -> "aa");
        # the length floor applies to the output too
        if len(stem) >= config.min_token_len:
            out.append(_mask_digits(stem, config.digit_mask))
    return out


def _mask_digits(token: str, mask: str) -> str:
    return "".join(mask if ch.isdigit() else ch for ch in token)


_DEFAULT_CONFIG = PrepConfig()


class Vocabulary:
    """Token-index bijection with reserved PAD=0 and UNK=1 entries.

    Built from the training split only; insertion order is first
    occurrence, so identical corpora produce identical vocabularies.
    """

    def __init__(self, tokens: list[str] | None = None):
        self._index_to_token: list[str] = [PAD_TOKEN, UNK_TOKEN]
        self._token_to_index: dict[str, int] = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
        for tok in tokens or []:
            self._add(tok)

    def _add(self, token: str) -> None:
        if token not in self._token_to_index:
            self._token_to_index[token] = len(self._index_to_token)
            self._index_to_token.append(token)

    @classmethod
    def build(cls, token_streams) -> "Vocabulary":
        vocab = cls()
        empty = True
        for stream in token_streams:
            empty = False
            for tok in stream:
                vocab._add(tok)
        if empty:
            raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
        return vocab

    def __len__(self) -> int:
        return len(self._index_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_index

    def index(self, token: str) -> int:
        return self._token_to_index.get(token, UNK_ID)

    def token(self, idx: int) -> str:
        return self._index_to_token[idx]

    def encode(self, tokens: list[str], max_len: int | None = None) -> list[int]:
        if max_len is not None:
            if max_len < 1:
                raise ValueError(f"max_len must be >= 1, got {max_len}")
            tokens = tokens[:max_len]
        return [self._token_to_index.get(tok, UNK_ID) for tok in tokens]

    def decode(self, ids: list[int]) -> list[str]:
        return [self._index_to_token[i] for i in ids]

    def save(self, path: str | Path) -> None:
        lines = [_VOCAB_HEADER]
        lines.extend(self._index_to_token[2:])
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != _VOCAB_HEADER:
            raise ArtifactError(f"{path}: not a v1 vocabulary file")
        return cls(lines[1:])


def file_checksum(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class Document:
    """One classified document: encoded ids plus the post-pipeline tokens
    they came from (equal length, both truncated to the same max_len)."""

    id: str
    tokens: list[int]
    raw_tokens: list[str]
    labels: set[int]


def parse_corpus_line(line: str) -> tuple[str, set[int], str]:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise ArtifactError(f"corpus line needs 3 tab-separated fields, got {len(parts)}")
    doc_id, label_field, text = parts
    labels = {int(x) for x in label_field.split(",") if x != ""}
    return doc_id, labels, text


def read_raw_corpus(path: str | Path) -> list[tuple[str, set[int], str]]:
    """Read the `<id> TAB <label,label,...> TAB <raw text>` format."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(parse_corpus_line(line))
    return records


_TOKENIZED_HEADER = "TOKCORPUS v1"


def write_tokenized_corpus(path: str | Path,
                           records: list[tuple[str, set[int], list[str]]]) -> None:
    """Persist post-pipeline token streams so they are never re-stemmed."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_TOKENIZED_HEADER + "\n")
        for doc_id, labels, tokens in records:
            label_field = ",".join(str(x) for x in sorted(labels))
            fh.write(f"{doc_id}\t{label_field}\t{' '.join(tokens)}\n")


def read_tokenized_corpus(path: str | Path) -> list[tuple[str, set[int], list[str]]]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != _TOKENIZED_HEADER:
            raise ArtifactError(f"{path}: not a v1 tokenized corpus (did you run preprocess?)")
        records = []
        for line in fh:
            if line.strip():
                doc_id, labels, text = parse_corpus_line(line)
                records.append((doc_id, labels, text.split()))
    return records


def documents_from_tokenized(records: list[tuple[str, set[int], list[str]]],
                             vocab: Vocabulary, max_len: int) -> list[Document]:
    docs = []
    for doc_id, labels, tokens in records:
        kept = tokens[:max_len]
        docs.append(Document(doc_id, vocab.encode(kept), kept, labels))
    return docs
