"""Attention exporter: translate sentences with a pluggable NMT backend
and write self-contained attention JSON files for the synchronization
pipeline."""

from .backends import (
    LexiconBackend,
    TransformersBackend,
    TranslationResult,
    load_backend,
)
from .errors import ExporterError, ModelLoadError, TokenizationError
from .exporter import (
    ExportRequest,
    attention_payload,
    export_attention,
    read_sentences,
)
from .subwords import SubwordVocab, detokenize, normalize, tokenize, train_vocab

__all__ = [
    "ExportRequest",
    "ExporterError",
    "LexiconBackend",
    "ModelLoadError",
    "SubwordVocab",
    "TokenizationError",
    "TransformersBackend",
    "TranslationResult",
    "attention_payload",
    "detokenize",
    "export_attention",
    "load_backend",
    "normalize",
    "read_sentences",
    "tokenize",
    "train_vocab",
]
