"""Exception hierarchy shared across the engine."""


class DentarxError(Exception):
    """Base class for all engine errors."""


class ParseError(DentarxError):
    """Malformed line in a knowledge-graph or records file."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class IntegrityError(DentarxError):
    """Graph-level invariant violated (dangling endpoint, bad typing, ...)."""


class UnknownNode(DentarxError):
    """A node id does not resolve in the graph."""


class KindMismatch(DentarxError):
    """A node resolved but has the wrong kind for the operation."""


class EmptyDevSet(DentarxError):
    """Gate fitting requires at least one dev case."""


class MissingGold(DentarxError):
    """Operation needs gold annotations that the record does not carry."""


class EmptyCorpus(DentarxError):
    """Tagger training requires a non-empty corpus."""


class DegenerateLabels(DentarxError):
    """Classifier training set contains a single class."""


class NoDiagnosis(DentarxError):
    """Candidate generation requires at least one diagnosis candidate."""


class ConfigError(DentarxError):
    """Invalid configuration value."""


class LengthMismatch(DentarxError):
    """Parallel lists of different lengths."""


class TooFewSamples(DentarxError):
    """Bootstrap needs at least two samples."""


class UnknownVariant(DentarxError):
    """Ablation variant outside the supported set."""
