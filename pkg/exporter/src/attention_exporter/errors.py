class ExporterError(Exception):
    """Base class for exporter failures."""


class ModelLoadError(ExporterError):
    """The requested translation backend could not be constructed."""


class TokenizationError(ExporterError):
    """A sentence cannot be tokenized by the selected backend."""
