"""Long-tailed synthetic corpora with known attention targets.

Label l appears with marginal probability base_rate * tail_decay^l
(independent draws, empty label sets redrawn - which preserves the
geometric count ratios).  A document is noise tokens plus, for each of
its labels, that label's trigger token inserted with probability
trigger_strength at a random position, so the trigger fully determines
the label when trigger_strength is 1.  Documents are split by synthetic
patient id; no patient crosses splits.

All emitted tokens are constructed to pass the preprocessing pipeline
unchanged, so the trigger mapping stays valid end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SynthSpecError
from .preprocess import pipeline

_CONSONANTS = "bcdfgjklmnpqrstvwxz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class SynthSpec:
    num_docs: int = 2000
    num_labels: int = 10
    vocab_noise_size: int = 120
    doc_len: tuple[int, int] = (20, 60)
    tail_decay: float = 0.7
    trigger_strength: float = 0.9
    seed: int = 0
    base_rate: float = 0.5

    def validate(self) -> None:
        if self.num_labels < 1:
            raise SynthSpecError("need at least one label")
        if self.num_docs < 10 * self.num_labels:
            raise SynthSpecError(
                f"num_docs {self.num_docs} < 10 * num_labels {self.num_labels}"
            )
        lo, hi = self.doc_len
        if not 1 <= lo <= hi:
            raise SynthSpecError(f"bad doc_len range {self.doc_len}")
        if lo < self.num_labels:
            raise SynthSpecError(
                f"doc_len lower bound {lo} < label count {self.num_labels}"
            )
        if not 0.0 < self.tail_decay <= 1.0:
            raise SynthSpecError(f"tail_decay must be in (0, 1], got {self.tail_decay}")
        if not 0.0 < self.trigger_strength <= 1.0:
            raise SynthSpecError(
                f"trigger_strength must be in (0, 1], got {self.trigger_strength}"
            )
        if not 0.0 < self.base_rate <= 1.0:
            raise SynthSpecError(f"base_rate must be in (0, 1], got {self.base_rate}")
        if self.vocab_noise_size < 1:
            raise SynthSpecError("vocab_noise_size must be >= 1")


@dataclass
class SynthCorpus:
    train: list[tuple[str, set[int], str]]
    valid: list[tuple[str, set[int], str]]
    test: list[tuple[str, set[int], str]]
    label_names: list[str]
    triggers: list[str]   # trigger token per label index


def _make_words(rng: np.random.Generator, count: int) -> list[str]:
    """Pseudo-words that the preprocessing pipeline leaves unchanged."""
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < count:
        length = int(rng.integers(5, 8))
        chars = []
        for pos in range(length):
            pool = _CONSONANTS if pos % 2 == 0 else _VOWELS
            chars.append(pool[rng.integers(0, len(pool))])
        word = "".join(chars)
        if word in seen:
            continue
        seen.add(word)
        if pipeline(word) == [word]:
            words.append(word)
    return words


def generate(spec: SynthSpec) -> SynthCorpus:
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    words = _make_words(rng, spec.num_labels + spec.vocab_noise_size)
    triggers = words[: spec.num_labels]
    noise = np.array(words[spec.num_labels:])
    label_names = [f"c{l:02d}" for l in range(spec.num_labels)]
    marginals = spec.base_rate * spec.tail_decay ** np.arange(spec.num_labels)

    num_patients = max(spec.num_docs // 2, 1)
    docs = []
    for i in range(spec.num_docs):
        labels = _draw_labels(rng, marginals)
        length = int(rng.integers(spec.doc_len[0], spec.doc_len[1] + 1))
        tokens = list(noise[rng.integers(0, len(noise), size=length)])
        for label in sorted(labels):
            if rng.random() < spec.trigger_strength:
                tokens.insert(int(rng.integers(0, len(tokens) + 1)), triggers[label])
        docs.append((f"d{i:05d}", f"p{i % num_patients:05d}", labels, " ".join(tokens)))

    patients = [f"p{i:05d}" for i in range(num_patients)]
    rng.shuffle(patients)
    n_train = max(int(round(0.7 * num_patients)), 1)
    n_valid = max(int(round(0.15 * num_patients)), 1)
    train_p = set(patients[:n_train])
    valid_p = set(patients[n_train: n_train + n_valid])

    splits: dict[str, list] = {"train": [], "valid": [], "test": []}
    for doc_id, patient, labels, text in docs:
        if patient in train_p:
            split = "train"
        elif patient in valid_p:
            split = "valid"
        else:
            split = "test"
        splits[split].append((doc_id, labels, text))
    return SynthCorpus(
        train=splits["train"], valid=splits["valid"], test=splits["test"],
        label_names=label_names, triggers=triggers,
    )


def _draw_labels(rng: np.random.Generator, marginals: np.ndarray) -> set[int]:
    for _ in range(10000):
        draw = rng.random(len(marginals)) < marginals
        if draw.any():
            return set(np.flatnonzero(draw).tolist())
    raise SynthSpecError("could not draw a non-empty label set")


def write_corpus(corpus: SynthCorpus, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for split in ("train", "valid", "test"):
        with open(out / f"corpus-{split}.tsv", "w", encoding="utf-8") as fh:
            for doc_id, labels, text in getattr(corpus, split):
                fh.write(f"{doc_id}\t{','.join(str(x) for x in sorted(labels))}\t{text}\n")
    with open(out / "labels.txt", "w", encoding="utf-8") as fh:
        for i, name in enumerate(corpus.label_names):
            fh.write(f"{i}\t{name}\n")
    with open(out / "triggers.txt", "w", encoding="utf-8") as fh:
        for name, trig in zip(corpus.label_names, corpus.triggers):
            fh.write(f"{name}\t{trig}\n")


def read_labels(path: str | Path) -> list[str]:
    names = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        idx, name = line.split("\t")
        assert int(idx) == len(names)
        names.append(name)
    return names


def read_triggers(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        name, trig = line.split("\t")
        out[name] = trig
    return out
