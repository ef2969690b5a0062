"""Prosodic phrase segmentation over word-aligned transcripts.

A prosodic phrase is a contiguous run of voiced words terminated by a
silent pause: any inter-word gap at or above the pause threshold starts a
new phrase.  Phrase labels are small integers (1..K, in utterance order)
and are later transferred onto translated token sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyTranscript, InconsistentTokenization, TimingError

#: Gaps at or above this many milliseconds are treated as phrase breaks.
DEFAULT_PAUSE_THRESHOLD_MS = 250.0


@dataclass(frozen=True)
class TimedWord:
    """A word with absolute start/end times (seconds) within its segment."""

    text: str
    start_s: float
    end_s: float

    def __post_init__(self):
        if not self.text:
            raise ValueError("word text must be non-empty")
        if self.start_s < 0:
            raise ValueError(f"word {self.text!r}: start_s must be >= 0")
        if self.end_s < self.start_s:
            raise ValueError(f"word {self.text!r}: end_s < start_s")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SegmentTranscript:
    """One dialogue line: time-ordered, non-overlapping words.

    ``lang`` is a BCP-47-ish tag ("en", "es", ...) used only by corpus
    statistics; it does not affect segmentation.
    """

    segment_id: str
    words: tuple[TimedWord, ...]
    lang: str = "und"

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if not self.words:
            raise EmptyTranscript(f"segment {self.segment_id!r} has no words")
        for i in range(len(self.words) - 1):
            cur, nxt = self.words[i], self.words[i + 1]
            if nxt.start_s < cur.end_s:
                raise TimingError(
                    f"words[{i + 1}]",
                    f"word {nxt.text!r} starts at {nxt.start_s} before "
                    f"{cur.text!r} ends at {cur.end_s}",
                )

    @property
    def start_s(self) -> float:
        return self.words[0].start_s

    @property
    def end_s(self) -> float:
        return self.words[-1].end_s

    def inter_word_gaps_s(self) -> list[float]:
        """Silent gap before each word boundary (length ``len(words) - 1``)."""
        return [
            self.words[i + 1].start_s - self.words[i].end_s
            for i in range(len(self.words) - 1)
        ]


@dataclass(frozen=True)
class ProsodicPhrase:
    """A voiced word span plus the silent pause that terminates it.

    ``word_span`` is a half-open ``(start, stop)`` index range into the
    transcript's word list.  ``trailing_pause_s`` is 0 for the final
    phrase of a segment.
    """

    phrase_index: int  # 1-based
    word_span: tuple[int, int]
    start_s: float
    end_s: float
    trailing_pause_s: float

    def __post_init__(self):
        if self.phrase_index < 1:
            raise ValueError("phrase_index is 1-based")
        lo, hi = self.word_span
        if not (0 <= lo < hi):
            raise ValueError(f"invalid word_span {self.word_span}")
        if self.end_s <= self.start_s:
            raise ValueError("phrase duration must be positive")
        if self.trailing_pause_s < 0:
            raise ValueError("trailing_pause_s must be >= 0")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s

    @property
    def n_words(self) -> int:
        return self.word_span[1] - self.word_span[0]


@dataclass(frozen=True)
class SourceLabeledSentence:
    """Source tokens with their phrase labels and the phrases themselves.

    Labels start at 1, never decrease, never skip, and reach exactly
    ``len(phrases)``.
    """

    tokens: tuple[str, ...]
    labels: tuple[int, ...]
    phrases: tuple[ProsodicPhrase, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "phrases", tuple(self.phrases))
        if len(self.tokens) != len(self.labels):
            raise ValueError("tokens and labels must have equal length")
        if not self.tokens:
            raise ValueError("sentence must have at least one token")
        if self.labels[0] != 1:
            raise ValueError("labels must start at 1")
        for a, b in zip(self.labels, self.labels[1:]):
            if b - a not in (0, 1):
                raise ValueError("labels must step by 0 or 1")
        if self.labels[-1] != len(self.phrases):
            raise ValueError(
                f"labels reach {self.labels[-1]} but there are "
                f"{len(self.phrases)} phrases"
            )

    @property
    def n_phrases(self) -> int:
        return len(self.phrases)


def segment_into_phrases(
    transcript: SegmentTranscript,
    pause_threshold_ms: float = DEFAULT_PAUSE_THRESHOLD_MS,
) -> list[ProsodicPhrase]:
    """Split a transcript into prosodic phrases at long silent gaps.

    A boundary is placed between adjacent words exactly when the gap
    between them, in milliseconds, is >= ``pause_threshold_ms``.  A gap
    equal to the threshold counts as a boundary.
    """
    if pause_threshold_ms <= 0:
        raise ValueError("pause_threshold_ms must be > 0")
    words = transcript.words

    # Boundary slot i sits between words[i] and words[i + 1].
    cuts = [
        i
        for i, gap in enumerate(transcript.inter_word_gaps_s())
        if gap * 1000.0 >= pause_threshold_ms
    ]

    phrases: list[ProsodicPhrase] = []
    span_start = 0
    for k, cut in enumerate([*cuts, len(words) - 1]):
        span = (span_start, cut + 1)
        last = words[cut]
        if cut + 1 < len(words):
            pause = words[cut + 1].start_s - last.end_s
        else:
            pause = 0.0
        phrases.append(
            ProsodicPhrase(
                phrase_index=k + 1,
                word_span=span,
                start_s=words[span_start].start_s,
                end_s=last.end_s,
                trailing_pause_s=pause,
            )
        )
        span_start = cut + 1
    return phrases


def label_source_tokens(
    transcript: SegmentTranscript,
    phrases: Sequence[ProsodicPhrase],
    tokenization: Sequence[tuple[str, int]],
) -> SourceLabeledSentence:
    """Project phrase labels onto an arbitrary tokenization of the words.

    ``tokenization`` lists ``(token_text, word_index)`` pairs where
    ``word_index`` is a 0-based index into ``transcript.words``.  Subword
    pieces repeat their word's index; punctuation-only tokens carry the
    index of the word they attach to.  Indices must be non-decreasing and
    cover every word.
    """
    n_words = len(transcript.words)
    word_label = [0] * n_words
    for phrase in phrases:
        for w in range(*phrase.word_span):
            word_label[w] = phrase.phrase_index

    if not tokenization:
        raise InconsistentTokenization("tokenization is empty")
    seen = [False] * n_words
    previous = -1
    labels: list[int] = []
    tokens: list[str] = []
    for pos, (token, word_index) in enumerate(tokenization):
        if not (0 <= word_index < n_words):
            raise InconsistentTokenization(
                f"token {pos} ({token!r}): word index {word_index} out of "
                f"range for {n_words} words"
            )
        if word_index < previous:
            raise InconsistentTokenization(
                f"token {pos} ({token!r}): word index {word_index} goes "
                f"backwards (previous {previous})"
            )
        seen[word_index] = True
        previous = word_index
        tokens.append(token)
        labels.append(word_label[word_index])

    missing = [i for i, s in enumerate(seen) if not s]
    if missing:
        raise InconsistentTokenization(
            f"tokenization does not cover word indices {missing}"
        )
    return SourceLabeledSentence(tuple(tokens), tuple(labels), tuple(phrases))
