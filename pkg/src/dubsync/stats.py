"""Corpus-level analyses over parallel (source, dubbed) segment pairs.

Three measurements: how often source pauses are mirrored by a pause in
the dubbed rendition, the target/source syllable-count ratio, and the
distribution of bending ratios a pipeline run produced.  Summaries use
population statistics and are exactly permutation-invariant (values are
sorted before aggregation).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus, NonPositiveRatio, SchemaError, UnsupportedLanguage
from .prosody import SegmentTranscript

#: Vowel sets for the syllable heuristic, keyed by primary language subtag.
VOWELS = {
    "en": set("aeiouy"),
    "es": set("aeiouáéíóúü"),
}


@dataclass(frozen=True)
class ParallelSegmentPair:
    """Matching source and dubbed transcripts of one dialogue line."""

    source: SegmentTranscript
    target: SegmentTranscript

    def __post_init__(self):
        if self.source.segment_id != self.target.segment_id:
            raise ValueError(
                f"segment ids differ: {self.source.segment_id!r} vs "
                f"{self.target.segment_id!r}"
            )

    @property
    def segment_id(self) -> str:
        return self.source.segment_id


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class StatsSummary:
    """Count, population mean/std, and an optional histogram."""

    metric: str
    count: int
    mean: float
    std: float
    histogram: Histogram | None = None

    def as_dict(self) -> dict:
        out: dict = {
            "metric": self.metric,
            "count": self.count,
            "mean": self.mean,
            "std": self.std,
        }
        if self.histogram is not None:
            out["histogram"] = {
                "bin_edges": list(self.histogram.bin_edges),
                "counts": list(self.histogram.counts),
            }
        return out


def summarize(metric: str, values: Sequence[float], bins: int = 10) -> StatsSummary:
    """Population summary of ``values``; sorting first makes the result
    independent of input order down to the last bit."""
    if len(values) == 0:
        raise EmptyCorpus(f"no values for metric {metric!r}")
    data = np.sort(np.asarray(values, dtype=np.float64))
    try:
        counts, edges = np.histogram(data, bins=bins)
    except ValueError:
        # A data span of a few ulps cannot be cut into `bins` distinct edges.
        counts, edges = np.histogram(data, bins=1)
    return StatsSummary(
        metric=metric,
        count=int(data.size),
        mean=float(data.mean()),
        std=float(data.std()),
        histogram=Histogram(tuple(float(e) for e in edges), tuple(int(c) for c in counts)),
    )


# ---------------------------------------------------------------------------
# Pause overlap
# ---------------------------------------------------------------------------


def _pause_intervals(transcript: SegmentTranscript) -> list[tuple[float, float]]:
    """Positive inter-word gaps as (start, end) intervals."""
    out = []
    for i in range(len(transcript.words) - 1):
        a = transcript.words[i].end_s
        b = transcript.words[i + 1].start_s
        if b > a:
            out.append((a, b))
    return out


def _overlaps(a: tuple[float, float], b: tuple[float, float]) -> bool:
    # Touching endpoints do not count as overlap.
    return min(a[1], b[1]) - max(a[0], b[0]) > 0


def pause_overlap_rate(
    pairs: Sequence[ParallelSegmentPair], min_pause_s: float
) -> float:
    """Fraction of source pauses of at least ``min_pause_s`` whose time
    interval intersects some pause in the dubbed counterpart.

    Target pauses are not thresholded: any positive inter-word gap in the
    target counts as a pause it could overlap with.
    """
    if not pairs:
        raise EmptyCorpus("no segment pairs")
    if min_pause_s < 0:
        raise ValueError("min_pause_s must be >= 0")
    eligible = 0
    overlapping = 0
    for pair in pairs:
        target_pauses = _pause_intervals(pair.target)
        for pause in _pause_intervals(pair.source):
            if pause[1] - pause[0] < min_pause_s:
                continue
            eligible += 1
            if any(_overlaps(pause, t) for t in target_pauses):
                overlapping += 1
    if eligible == 0:
        raise EmptyCorpus(
            f"no source pauses of at least {min_pause_s} s in the corpus"
        )
    return overlapping / eligible


# ---------------------------------------------------------------------------
# Syllables
# ---------------------------------------------------------------------------


def count_syllables(text: str, lang: str) -> int:
    """Heuristic syllable count: maximal vowel-letter runs per word, with
    a floor of one syllable per whitespace-separated word."""
    if not text.strip():
        raise ValueError("text is empty")
    primary = lang.split("-")[0].split("_")[0].lower()
    if primary not in VOWELS:
        raise UnsupportedLanguage(
            f"no vowel set for language {lang!r} (have {sorted(VOWELS)})"
        )
    vowels = VOWELS[primary]

    total = 0
    for word in text.lower().split():
        runs = 0
        in_run = False
        for ch in word:
            if ch in vowels:
                if not in_run:
                    runs += 1
                in_run = True
            else:
                in_run = False
        total += max(runs, 1)
    return total


def transcript_syllables(transcript: SegmentTranscript) -> int:
    text = " ".join(w.text for w in transcript.words)
    return count_syllables(text, transcript.lang)


def syllable_ratio_stats(
    pairs: Sequence[ParallelSegmentPair], bins: int = 10
) -> StatsSummary:
    """Distribution of target/source syllable-count ratios per pair."""
    if not pairs:
        raise EmptyCorpus("no segment pairs")
    ratios = [
        transcript_syllables(p.target) / transcript_syllables(p.source)
        for p in pairs
    ]
    return summarize("syllable_ratio", ratios, bins=bins)


# ---------------------------------------------------------------------------
# Bending ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioDistribution:
    """A ratio distribution on both the raw and the log scale."""

    ratio: StatsSummary
    log_ratio: StatsSummary


def bend_ratio_distribution(
    ratios: Iterable[float], bins: int = 10
) -> RatioDistribution:
    values = list(ratios)
    if not values:
        raise EmptyCorpus("no bending ratios")
    bad = [r for r in values if not r > 0]
    if bad:
        raise NonPositiveRatio(f"ratios must be > 0, got {bad[:5]}")
    return RatioDistribution(
        ratio=summarize("bend_ratio", values, bins=bins),
        log_ratio=summarize("log_bend_ratio", list(np.log(values)), bins=bins),
    )


# ---------------------------------------------------------------------------
# Corpus loading
# ---------------------------------------------------------------------------


def load_parallel_corpus(directory: str | Path) -> list[ParallelSegmentPair]:
    """Load pairs of ``<stem>.src.json`` / ``<stem>.tgt.json`` segment
    files from a directory, sorted by stem."""
    from .formats import parse_segment

    directory = Path(directory)
    sources = sorted(directory.glob("*.src.json"))
    pairs = []
    for src_path in sources:
        tgt_path = src_path.with_name(src_path.name[: -len(".src.json")] + ".tgt.json")
        if not tgt_path.exists():
            raise SchemaError(str(tgt_path), "missing target file for source")
        pairs.append(
            ParallelSegmentPair(
                source=parse_segment(src_path.read_bytes()),
                target=parse_segment(tgt_path.read_bytes()),
            )
        )
    return pairs


def render_table(rows: Sequence[tuple[str, str]]) -> str:
    """Two-column plain-text table used by the analyze command."""
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)
