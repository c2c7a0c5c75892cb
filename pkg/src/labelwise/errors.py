"""Exception hierarchy shared by all labelwise modules.

Every error carries a short machine-readable ``code`` so the CLI can emit
one structured error line and a nonzero exit status.
"""


class LabelwiseError(Exception):
    code = "error"


class DimensionError(LabelwiseError, ValueError):
    """Operand shapes are incompatible for the requested operation."""

    code = "dimension"


class RankError(LabelwiseError, ValueError):
    """A scalar was required (e.g. the loss handed to backward)."""

    code = "rank"


class DegenerateMaskError(LabelwiseError, ValueError):
    """A softmax row has no unmasked position left."""

    code = "degenerate-mask"


class TapeConsumedError(LabelwiseError, RuntimeError):
    """backward() was called twice on the same tape."""

    code = "tape-consumed"


class EmptyCorpusError(LabelwiseError, ValueError):
    code = "empty-corpus"


class InsufficientVocabularyError(LabelwiseError, ValueError):
    """Vocabulary too small for the requested negative-sample count."""

    code = "insufficient-vocabulary"


class UndefinedAUCError(LabelwiseError, ValueError):
    """AUC is undefined when the truth vector is single-class."""

    code = "undefined-auc"


class SynthSpecError(LabelwiseError, ValueError):
    """Synthetic corpus spec is infeasible or inconsistent."""

    code = "synth-spec"


class ConfigError(LabelwiseError, ValueError):
    """Run configuration failed validation (unknown key, bad value)."""

    code = "config"


class ArtifactError(LabelwiseError, ValueError):
    """On-disk artifacts are missing or their checksums disagree."""

    code = "artifact-incompatibility"


class DivergenceError(LabelwiseError, RuntimeError):
    """Training produced a non-finite loss."""

    code = "divergence"

    def __init__(self, epoch: int, batch: int, value: float):
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


class LabelNotFoundError(LabelwiseError, KeyError):
    code = "label-not-found"
