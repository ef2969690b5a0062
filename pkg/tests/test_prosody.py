import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dubsync.errors import EmptyTranscript, InconsistentTokenization, TimingError
from dubsync.prosody import (
    ProsodicPhrase,
    SegmentTranscript,
    TimedWord,
    label_source_tokens,
    segment_into_phrases,
)


def make_transcript(spans, segment_id="seg", lang="en"):
    words = tuple(
        TimedWord(f"w{i}", start, end) for i, (start, end) in enumerate(spans)
    )
    return SegmentTranscript(segment_id, words, lang=lang)


# ---------------------------------------------------------------------------
# segment_into_phrases
# ---------------------------------------------------------------------------


def test_gap_at_threshold_splits():
    transcript = make_transcript([(0.0, 0.5), (0.8, 1.2)])
    phrases = segment_into_phrases(transcript, 250)
    assert len(phrases) == 2
    assert phrases[0].word_span == (0, 1)
    assert phrases[0].trailing_pause_s == pytest.approx(0.3)
    assert phrases[1].word_span == (1, 2)
    assert phrases[1].trailing_pause_s == 0.0


def test_gap_below_threshold_keeps_one_phrase():
    transcript = make_transcript([(0.0, 0.5), (0.7, 1.2)])
    phrases = segment_into_phrases(transcript, 250)
    assert len(phrases) == 1
    assert phrases[0].word_span == (0, 2)
    assert phrases[0].start_s == 0.0
    assert phrases[0].end_s == 1.2


def test_single_word():
    phrases = segment_into_phrases(make_transcript([(0.0, 0.4)]), 250)
    assert len(phrases) == 1
    assert phrases[0].duration_s == pytest.approx(0.4)
    assert phrases[0].trailing_pause_s == 0.0


def test_exact_threshold_gap_is_boundary():
    transcript = make_transcript([(0.0, 0.5), (0.75, 1.0)])
    assert len(segment_into_phrases(transcript, 250)) == 2


def test_empty_transcript_rejected():
    with pytest.raises(EmptyTranscript):
        SegmentTranscript("seg", ())


def test_overlapping_words_rejected():
    with pytest.raises(TimingError):
        make_transcript([(0.0, 0.5), (0.4, 0.8)])


def test_zero_duration_word_allowed():
    transcript = make_transcript([(0.0, 0.5), (0.52, 0.52), (0.55, 1.0)])
    phrases = segment_into_phrases(transcript, 250)
    assert len(phrases) == 1
    assert phrases[0].word_span == (0, 3)


def test_bad_threshold():
    with pytest.raises(ValueError):
        segment_into_phrases(make_transcript([(0.0, 0.4)]), 0)


# ---------------------------------------------------------------------------
# label_source_tokens
# ---------------------------------------------------------------------------


def two_phrase_fixture():
    transcript = make_transcript([(0.0, 0.3), (0.6, 0.9), (0.95, 1.2)])
    phrases = segment_into_phrases(transcript, 250)
    assert [p.word_span for p in phrases] == [(0, 1), (1, 3)]
    return transcript, phrases


def test_one_token_per_word():
    transcript, phrases = two_phrase_fixture()
    sentence = label_source_tokens(
        transcript, phrases, [("A", 0), ("B", 1), ("C", 2)]
    )
    assert sentence.labels == (1, 2, 2)
    assert sentence.n_phrases == 2


def test_subwords_inherit_word_phrase():
    transcript = make_transcript([(0.0, 0.3), (0.35, 0.9), (1.2, 1.5)])
    phrases = segment_into_phrases(transcript, 250)
    assert [p.word_span for p in phrases] == [(0, 2), (2, 3)]
    sentence = label_source_tokens(
        transcript, phrases, [("A", 0), ("b1", 1), ("b2", 1), ("C", 2)]
    )
    assert sentence.labels == (1, 1, 1, 2)


def test_single_phrase_all_ones():
    transcript = make_transcript([(0.0, 0.3), (0.35, 0.9)])
    phrases = segment_into_phrases(transcript, 250)
    sentence = label_source_tokens(
        transcript, phrases, [("a", 0), ("b", 1), (".", 1)]
    )
    assert sentence.labels == (1, 1, 1)


def test_out_of_range_word_index():
    transcript, phrases = two_phrase_fixture()
    with pytest.raises(InconsistentTokenization):
        label_source_tokens(transcript, phrases, [("A", 0), ("B", 5), ("C", 2)])


def test_backwards_word_index():
    transcript, phrases = two_phrase_fixture()
    with pytest.raises(InconsistentTokenization):
        label_source_tokens(transcript, phrases, [("B", 1), ("A", 0), ("C", 2)])


def test_uncovered_word():
    transcript, phrases = two_phrase_fixture()
    with pytest.raises(InconsistentTokenization):
        label_source_tokens(transcript, phrases, [("A", 0), ("C", 2)])


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------


@st.composite
def transcripts(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    time = 0.0
    spans = []
    for _ in range(n):
        time += draw(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
        duration = draw(st.floats(min_value=0.01, max_value=2.0, allow_nan=False))
        spans.append((time, time + duration))
        time += duration
    return make_transcript(spans)


@given(transcripts(), st.floats(min_value=1.0, max_value=2000.0))
@settings(max_examples=200)
def test_partition_property(transcript, threshold):
    phrases = segment_into_phrases(transcript, threshold)
    covered = [w for p in phrases for w in range(*p.word_span)]
    assert covered == list(range(len(transcript.words)))
    assert [p.phrase_index for p in phrases] == list(range(1, len(phrases) + 1))


@given(transcripts(), st.floats(min_value=1.0, max_value=2000.0))
@settings(max_examples=200)
def test_boundary_iff_gap_at_least_threshold(transcript, threshold):
    phrases = segment_into_phrases(transcript, threshold)
    boundaries = {p.word_span[1] - 1 for p in phrases[:-1]}
    for i, gap in enumerate(transcript.inter_word_gaps_s()):
        assert (i in boundaries) == (gap * 1000.0 >= threshold)


@given(transcripts())
@settings(max_examples=100)
def test_threshold_monotonicity(transcript):
    thresholds = [50, 100, 250, 400, 700, 1000]
    counts = [len(segment_into_phrases(transcript, t)) for t in thresholds]
    assert counts == sorted(counts, reverse=True)


@given(transcripts(), st.floats(min_value=1.0, max_value=2000.0), st.data())
@settings(max_examples=100)
def test_labeling_invariants_hold(transcript, threshold, data):
    phrases = segment_into_phrases(transcript, threshold)
    tokenization = []
    for i in range(len(transcript.words)):
        pieces = data.draw(st.integers(min_value=1, max_value=3))
        tokenization.extend((f"t{i}_{j}", i) for j in range(pieces))
    sentence = label_source_tokens(transcript, phrases, tokenization)
    assert sentence.labels[0] == 1
    assert sentence.labels[-1] == len(phrases)
    for a, b in zip(sentence.labels, sentence.labels[1:]):
        assert b - a in (0, 1)


def test_trailing_pause_matches_gap():
    transcript = make_transcript([(0.0, 0.5), (1.0, 1.5), (2.5, 3.0)])
    phrases = segment_into_phrases(transcript, 250)
    assert len(phrases) == 3
    assert phrases[0].trailing_pause_s == pytest.approx(0.5)
    assert phrases[1].trailing_pause_s == pytest.approx(1.0)
    assert phrases[2].trailing_pause_s == 0.0


def test_phrase_requires_positive_duration():
    with pytest.raises(ValueError):
        ProsodicPhrase(1, (0, 1), 1.0, 1.0, 0.0)
