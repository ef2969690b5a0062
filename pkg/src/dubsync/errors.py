"""Exception types shared across the pipeline.

Every domain failure raises a subclass of :class:`DubsyncError`, so CLI
entry points can catch one type and translate it to exit code 1.
"""

from __future__ import annotations


class DubsyncError(Exception):
    """Base class for all domain errors."""


class EmptyTranscript(DubsyncError):
    """A transcript contains no words."""


class TimingError(DubsyncError):
    """Word timings are inconsistent (overlap, negative span, ...)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InconsistentTokenization(DubsyncError):
    """A token-to-word mapping is out of range, unordered, or incomplete."""


class AlignmentInfeasible(DubsyncError):
    """No admissible label sequence exists (more labels than word groups)."""


class DimensionMismatch(DubsyncError):
    """Matrix, token list, or phrase list sizes disagree."""


class CandidateExplosion(DubsyncError):
    """The admissible labeling set exceeds the enumeration cap."""


class EmptyPhrase(DubsyncError):
    """A phrase has no predicted phonemes to scale."""


class PlanDegenerate(DubsyncError):
    """A duration plan entry cannot be realized (zero or sub-phoneme length)."""


class SchemaError(DubsyncError):
    """A JSON artifact violates its schema.  ``path`` names the bad field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class PhoSyntaxError(DubsyncError):
    """A phoneme file line cannot be parsed.  ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyCorpus(DubsyncError):
    """A corpus analysis was asked to run over nothing."""


class UnsupportedLanguage(DubsyncError):
    """No syllable heuristic is registered for the requested language."""


class NonPositiveRatio(DubsyncError):
    """A ratio distribution received a value that is not strictly positive."""
