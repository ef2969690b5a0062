"""Parsers and emitters for the pipeline's file artifacts.

Three families of artifacts flow between stages:

* segment JSON: a dialogue line with word timings,
* attention JSON: source/target token lists plus the decoder attention
  matrix (target-major), self-contained for replay without the MT system,
* ``.pho`` text: phoneme symbol, duration in ms, optional (percent, f0)
  pitch pairs per line; ``_`` is silence; ``;`` starts a comment.

Emission is canonical: single-space separation, integer milliseconds,
``\\n`` newlines, no trailing whitespace, so golden files can be compared
byte for byte.  The stage artifacts the CLI writes (phrases, labeling)
round-trip through here as well.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

from .alignment import AlignmentResult, AttentionMatrix, CandidateLabeling, TargetTokens
from .errors import DimensionMismatch, PhoSyntaxError, SchemaError, TimingError
from .prosody import ProsodicPhrase, SegmentTranscript, TimedWord
from .timing import PAUSE_SYMBOL, PhonemeTiming, PhonemeTrack

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# JSON plumbing
# ---------------------------------------------------------------------------


def _load_json(data: bytes | str, what: str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError("", f"{what} is not valid UTF-8: {exc}") from exc
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"{what} is not valid JSON: {exc}") from exc
    except RecursionError as exc:
        raise SchemaError("", f"{what} is nested too deeply") from exc


def _require(obj: dict, path: str, key: str, kind: type | tuple) -> Any:
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    value = obj[key]
    numeric = kind is float
    if numeric:
        kind = (int, float)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(
            f"{path}.{key}" if path else key,
            f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
        )
    if numeric and not math.isfinite(value):
        raise SchemaError(f"{path}.{key}" if path else key, "must be finite")
    return value


def _check_version(obj: dict, what: str) -> None:
    version = _require(obj, "", "version", int)
    if version != SCHEMA_VERSION:
        raise SchemaError("version", f"unsupported {what} version {version}")


def _dump_json(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Segment files
# ---------------------------------------------------------------------------


def parse_segment(data: bytes | str) -> SegmentTranscript:
    """Read a segment JSON file into a validated transcript.

    Structural problems raise :class:`SchemaError` naming the field;
    overlapping or negative word spans raise :class:`TimingError`.
    """
    obj = _load_json(data, "segment file")
    if not isinstance(obj, dict):
        raise SchemaError("", "segment file must be a JSON object")
    _check_version(obj, "segment")
    segment_id = _require(obj, "", "segment_id", str)
    lang = _require(obj, "", "lang", str)
    words_raw = _require(obj, "", "words", list)
    if not words_raw:
        raise SchemaError("words", "segment has no words")

    words = []
    for i, entry in enumerate(words_raw):
        path = f"words[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        text = _require(entry, path, "text", str)
        start_s = float(_require(entry, path, "start_s", float))
        end_s = float(_require(entry, path, "end_s", float))
        if not text:
            raise SchemaError(f"{path}.text", "word text is empty")
        try:
            words.append(TimedWord(text, start_s, end_s))
        except ValueError as exc:
            raise TimingError(path, str(exc)) from exc
    return SegmentTranscript(segment_id, tuple(words), lang=lang)


def emit_segment(transcript: SegmentTranscript) -> bytes:
    return _dump_json(
        {
            "version": SCHEMA_VERSION,
            "segment_id": transcript.segment_id,
            "lang": transcript.lang,
            "words": [
                {"text": w.text, "start_s": w.start_s, "end_s": w.end_s}
                for w in transcript.words
            ],
        }
    )


# ---------------------------------------------------------------------------
# Attention files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttentionDocument:
    """The contents of one attention file, validated and row-normalized.

    ``src_tokens`` pairs each source token with the 0-based index of the
    word it came from, ready for phrase label projection.
    """

    matrix: AttentionMatrix
    src_tokens: tuple[tuple[str, int], ...]
    target: TargetTokens


def parse_attention(data: bytes | str) -> AttentionDocument:
    """Read an attention JSON file; rows come back normalized to sum 1.

    Rows that sum to zero are left untouched and recorded in
    ``matrix.zero_sum_rows``.  Unknown top-level keys (exporter metadata)
    are ignored.
    """
    obj = _load_json(data, "attention file")
    if not isinstance(obj, dict):
        raise SchemaError("", "attention file must be a JSON object")
    _check_version(obj, "attention")

    src_raw = _require(obj, "", "src_tokens", list)
    tgt_raw = _require(obj, "", "tgt_tokens", list)
    matrix_raw = _require(obj, "", "attention", list)
    if not src_raw:
        raise SchemaError("src_tokens", "no source tokens")
    if not tgt_raw:
        raise SchemaError("tgt_tokens", "no target tokens")

    src_tokens = []
    previous = -1
    for i, entry in enumerate(src_raw):
        path = f"src_tokens[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        text = _require(entry, path, "text", str)
        word_index = _require(entry, path, "word_index", int)
        if word_index < 0:
            raise SchemaError(f"{path}.word_index", "must be >= 0")
        if word_index < previous:
            raise SchemaError(f"{path}.word_index", "word indices go backwards")
        previous = word_index
        src_tokens.append((text, word_index))

    tgt_texts = []
    tgt_groups = []
    for i, entry in enumerate(tgt_raw):
        path = f"tgt_tokens[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        tgt_texts.append(_require(entry, path, "text", str))
        tgt_groups.append(_require(entry, path, "word_group", int))
    try:
        target = TargetTokens(tuple(tgt_texts), tuple(tgt_groups))
    except ValueError as exc:
        raise SchemaError("tgt_tokens", str(exc)) from exc

    n, m = len(tgt_raw), len(src_raw)
    if len(matrix_raw) != n:
        raise DimensionMismatch(
            f"attention has {len(matrix_raw)} rows for {n} target tokens"
        )
    rows = []
    for i, row in enumerate(matrix_raw):
        if not isinstance(row, list):
            raise SchemaError(f"attention[{i}]", "expected array")
        if len(row) != m:
            raise DimensionMismatch(
                f"attention row {i} has {len(row)} entries for {m} source tokens"
            )
        values = []
        for j, value in enumerate(row):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaError(f"attention[{i}][{j}]", "expected number")
            value = float(value)
            if not math.isfinite(value):
                raise SchemaError(f"attention[{i}][{j}]", "must be finite")
            if value < 0:
                raise SchemaError(f"attention[{i}][{j}]", "must be >= 0")
            values.append(value)
        rows.append(values)

    matrix = AttentionMatrix(rows).normalized()
    return AttentionDocument(matrix, tuple(src_tokens), target)


def emit_attention(
    doc: AttentionDocument, meta: dict[str, Any] | None = None
) -> bytes:
    obj: dict[str, Any] = {
        "version": SCHEMA_VERSION,
        "src_tokens": [
            {"text": text, "word_index": idx} for text, idx in doc.src_tokens
        ],
        "tgt_tokens": [
            {"text": text, "word_group": group}
            for text, group in zip(doc.target.tokens, doc.target.word_group)
        ],
        "attention": [[float(v) for v in row] for row in doc.matrix.weights],
    }
    if meta:
        obj["meta"] = meta
    return _dump_json(obj)


# ---------------------------------------------------------------------------
# .pho files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhoComment:
    """A comment line, remembered with how many entries preceded it."""

    entry_index: int
    text: str


@dataclass(frozen=True)
class PhoDocument:
    track: PhonemeTrack
    comments: tuple[PhoComment, ...]


def _format_number(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def parse_pho_document(data: bytes | str) -> PhoDocument:
    """Parse a ``.pho`` file, keeping comments (with their positions) on
    the side.  Raises :class:`PhoSyntaxError` with a 1-based line number
    for anything unreadable; never raises anything else, regardless of
    input bytes."""
    if isinstance(data, str):
        raw_lines = data.splitlines()
    else:
        raw_lines = []
        for no, line in enumerate(data.splitlines(), start=1):
            try:
                raw_lines.append(line.decode("utf-8"))
            except UnicodeDecodeError as exc:
                raise PhoSyntaxError(no, f"not valid UTF-8: {exc}") from exc

    entries: list[PhonemeTiming] = []
    comments: list[PhoComment] = []
    for no, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(";"):
            comments.append(PhoComment(len(entries), stripped[1:].strip()))
            continue
        fields = stripped.split()
        if len(fields) < 2:
            raise PhoSyntaxError(no, f"expected 'symbol duration ...', got {line!r}")
        symbol = fields[0]
        if not (fields[1].isascii() and fields[1].isdigit()):
            raise PhoSyntaxError(
                no, f"duration must be a plain integer, got {fields[1]!r}"
            )
        duration = int(fields[1])
        if len(fields) % 2 != 0:
            raise PhoSyntaxError(no, "pitch values must come in (percent, f0) pairs")
        points = []
        for pct_raw, f0_raw in zip(fields[2::2], fields[3::2]):
            try:
                pct, f0 = float(pct_raw), float(f0_raw)
            except ValueError as exc:
                raise PhoSyntaxError(no, f"bad pitch value: {exc}") from exc
            points.append((pct, f0))
        try:
            entries.append(PhonemeTiming(symbol, duration, tuple(points)))
        except ValueError as exc:
            raise PhoSyntaxError(no, str(exc)) from exc
    return PhoDocument(PhonemeTrack(tuple(entries)), tuple(comments))


def parse_pho(data: bytes | str) -> PhonemeTrack:
    """Parse a ``.pho`` file into a track, dropping comments."""
    return parse_pho_document(data).track


def emit_pho(track: PhonemeTrack) -> bytes:
    """Write a track in canonical form (comments are never re-emitted)."""
    lines = []
    for entry in track.entries:
        fields = [entry.phoneme, str(entry.duration_ms)]
        for pct, f0 in entry.pitch_points:
            fields.append(_format_number(pct))
            fields.append(_format_number(f0))
        lines.append(" ".join(fields))
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def split_pho_phrases(doc: PhoDocument) -> list[list[PhonemeTiming]]:
    """Split a predicted ``.pho`` document into per-phrase phoneme lists
    using its ``; phrase k`` marker comments.

    Markers must appear as 1, 2, ... in order, the first before any
    entry.  Every entry between marker k and the next marker belongs to
    phrase k (predicted pauses included: they are scaled with their
    phrase).
    """
    markers = []
    for comment in doc.comments:
        fields = comment.text.split()
        if (
            len(fields) == 2
            and fields[0] == "phrase"
            and fields[1].isascii()
            and fields[1].isdigit()
        ):
            markers.append((comment.entry_index, int(fields[1])))

    if not markers:
        raise DimensionMismatch("predicted track has no '; phrase k' markers")
    expected = list(range(1, len(markers) + 1))
    if [k for _, k in markers] != expected:
        raise DimensionMismatch(
            f"phrase markers out of order: {[k for _, k in markers]}"
        )
    if markers[0][0] != 0:
        raise DimensionMismatch("entries appear before the first phrase marker")

    entries = doc.track.entries
    bounds = [index for index, _ in markers] + [len(entries)]
    return [list(entries[a:b]) for a, b in zip(bounds, bounds[1:])]


# ---------------------------------------------------------------------------
# Stage artifacts: phrases.json and labeling.json
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PhraseDocument:
    """Output of the segmentation stage: phrases plus per-word labels."""

    segment_id: str
    lang: str
    pause_threshold_ms: float
    phrases: tuple[ProsodicPhrase, ...]
    words: tuple[TimedWord, ...]
    word_labels: tuple[int, ...]


def emit_phrases(
    transcript: SegmentTranscript,
    phrases: Sequence[ProsodicPhrase],
    pause_threshold_ms: float,
) -> bytes:
    word_labels = [0] * len(transcript.words)
    for phrase in phrases:
        for w in range(*phrase.word_span):
            word_labels[w] = phrase.phrase_index
    return _dump_json(
        {
            "version": SCHEMA_VERSION,
            "segment_id": transcript.segment_id,
            "lang": transcript.lang,
            "pause_threshold_ms": pause_threshold_ms,
            "phrases": [
                {
                    "index": p.phrase_index,
                    "word_start": p.word_span[0],
                    "word_end": p.word_span[1],
                    "start_s": p.start_s,
                    "end_s": p.end_s,
                    "trailing_pause_s": p.trailing_pause_s,
                }
                for p in phrases
            ],
            "words": [
                {
                    "text": w.text,
                    "start_s": w.start_s,
                    "end_s": w.end_s,
                    "label": label,
                }
                for w, label in zip(transcript.words, word_labels)
            ],
        }
    )


def parse_phrases(data: bytes | str) -> PhraseDocument:
    obj = _load_json(data, "phrases file")
    if not isinstance(obj, dict):
        raise SchemaError("", "phrases file must be a JSON object")
    _check_version(obj, "phrases")
    segment_id = _require(obj, "", "segment_id", str)
    lang = _require(obj, "", "lang", str)
    threshold = float(_require(obj, "", "pause_threshold_ms", float))

    words = []
    labels = []
    for i, entry in enumerate(_require(obj, "", "words", list)):
        path = f"words[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        words.append(
            TimedWord(
                _require(entry, path, "text", str),
                float(_require(entry, path, "start_s", float)),
                float(_require(entry, path, "end_s", float)),
            )
        )
        labels.append(_require(entry, path, "label", int))

    phrases = []
    for i, entry in enumerate(_require(obj, "", "phrases", list)):
        path = f"phrases[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(path, "expected object")
        try:
            phrases.append(
                ProsodicPhrase(
                    phrase_index=_require(entry, path, "index", int),
                    word_span=(
                        _require(entry, path, "word_start", int),
                        _require(entry, path, "word_end", int),
                    ),
                    start_s=float(_require(entry, path, "start_s", float)),
                    end_s=float(_require(entry, path, "end_s", float)),
                    trailing_pause_s=float(
                        _require(entry, path, "trailing_pause_s", float)
                    ),
                )
            )
        except ValueError as exc:
            raise SchemaError(path, str(exc)) from exc
    if not phrases:
        raise SchemaError("phrases", "no phrases")
    return PhraseDocument(
        segment_id=segment_id,
        lang=lang,
        pause_threshold_ms=threshold,
        phrases=tuple(phrases),
        words=tuple(words),
        word_labels=tuple(labels),
    )


def emit_labeling(segment_id: str, result: AlignmentResult) -> bytes:
    return _dump_json(
        {
            "version": SCHEMA_VERSION,
            "segment_id": segment_id,
            "labels": list(result.best.labels),
            "log_score": result.best.log_score,
            "candidate_count": result.candidate_count,
        }
    )


@dataclass(frozen=True)
class LabelingDocument:
    segment_id: str
    result: AlignmentResult


def parse_labeling(data: bytes | str) -> LabelingDocument:
    obj = _load_json(data, "labeling file")
    if not isinstance(obj, dict):
        raise SchemaError("", "labeling file must be a JSON object")
    _check_version(obj, "labeling")
    segment_id = _require(obj, "", "segment_id", str)
    labels_raw = _require(obj, "", "labels", list)
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in labels_raw):
        raise SchemaError("labels", "expected array of integers")
    log_score = float(_require(obj, "", "log_score", float))
    count = _require(obj, "", "candidate_count", int)
    try:
        best = CandidateLabeling(tuple(labels_raw), log_score)
    except ValueError as exc:
        raise SchemaError("labels", str(exc)) from exc
    return LabelingDocument(segment_id, AlignmentResult(best, count))
