"""Turn translation results into attention JSON files.

The emitted schema is the one the synchronization pipeline parses:

    {"version": 1,
     "src_tokens": [{"text": ..., "word_index": <0-based word>}, ...],
     "tgt_tokens": [{"text": ..., "word_group": <1-based word>}, ...],
     "attention": [[...], ...],          # one row per target piece
     "meta": {...}}                      # backend provenance, ignored downstream

Rows sum to 1 and the matrix is rectangular with dimensions matching the
token lists, so every file is self-contained for replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .backends import TranslationResult
from .errors import ExporterError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExportRequest:
    """Sentences to translate, each with a stable segment id."""

    sentences: tuple[tuple[str, str], ...]  # (segment_id, text)
    model_id: str

    def __post_init__(self):
        if not self.sentences:
            raise ExporterError("request has no sentences")
        ids = [sid for sid, _ in self.sentences]
        if len(set(ids)) != len(ids):
            raise ExporterError("segment ids must be unique")


def attention_payload(result: TranslationResult, extra_meta: dict | None = None) -> dict:
    meta = dict(result.meta)
    meta["translation"] = result.translation
    if extra_meta:
        meta.update(extra_meta)
    return {
        "version": SCHEMA_VERSION,
        "src_tokens": [
            {"text": text, "word_index": index} for text, index in result.src_pieces
        ],
        "tgt_tokens": [
            {"text": text, "word_group": group} for text, group in result.tgt_pieces
        ],
        "attention": [[float(v) for v in row] for row in result.rows],
        "meta": meta,
    }


def export_attention(request: ExportRequest, backend, out_dir: str | Path) -> list[Path]:
    """Translate every sentence and write one attention file per segment.

    Returns the written paths, named ``<segment_id>.attention.json``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    texts = [text for _, text in request.sentences]
    results = backend.translate_batch(texts)

    written = []
    for (segment_id, _), result in zip(request.sentences, results):
        payload = attention_payload(result, {"segment_id": segment_id})
        path = out_dir / f"{segment_id}.attention.json"
        path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        written.append(path)
    return written


def read_sentences(path: str | Path) -> list[tuple[str, str]]:
    """Read a sentences file: one sentence per line, optionally prefixed
    with ``<segment_id><TAB>``.  Unprefixed lines get ids s0001, s0002...
    Blank lines and ``#`` comments are skipped."""
    out = []
    auto = 0
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" in line:
            segment_id, text = line.split("\t", 1)
            segment_id = segment_id.strip()
            text = text.strip()
        else:
            auto += 1
            segment_id, text = f"s{auto:04d}", line
        out.append((segment_id, text))
    return out
