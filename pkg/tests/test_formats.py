import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dubsync.errors import (
    DimensionMismatch,
    PhoSyntaxError,
    SchemaError,
    TimingError,
)
from dubsync.formats import (
    emit_attention,
    emit_pho,
    emit_segment,
    parse_attention,
    parse_pho,
    parse_pho_document,
    parse_segment,
    split_pho_phrases,
)
from dubsync.timing import PhonemeTiming, PhonemeTrack

DATA = Path(__file__).parent / "data"

SEGMENT_OK = {
    "version": 1,
    "segment_id": "seg1",
    "lang": "en",
    "words": [
        {"text": "keep", "start_s": 0.0, "end_s": 0.5},
        {"text": "going", "start_s": 0.55, "end_s": 1.0},
    ],
}

ATTENTION_OK = {
    "version": 1,
    "src_tokens": [{"text": "a", "word_index": 0}, {"text": "b", "word_index": 1}],
    "tgt_tokens": [
        {"text": "x", "word_group": 1},
        {"text": "y", "word_group": 2},
        {"text": "z", "word_group": 3},
    ],
    "attention": [[0.9, 0.1], [0.6, 0.4], [0.1, 0.9]],
}


def as_bytes(obj) -> bytes:
    return json.dumps(obj).encode("utf-8")


# ---------------------------------------------------------------------------
# Segment files
# ---------------------------------------------------------------------------


def test_parse_segment_minimal():
    transcript = parse_segment(
        as_bytes(
            {
                "version": 1,
                "segment_id": "s",
                "lang": "en",
                "words": [{"text": "hi", "start_s": 0.0, "end_s": 0.4}],
            }
        )
    )
    assert len(transcript.words) == 1
    assert transcript.words[0].text == "hi"
    assert transcript.lang == "en"


def test_parse_segment_out_of_order_words():
    bad = dict(SEGMENT_OK)
    bad["words"] = [
        {"text": "b", "start_s": 1.0, "end_s": 1.5},
        {"text": "a", "start_s": 0.0, "end_s": 0.5},
    ]
    with pytest.raises(TimingError):
        parse_segment(as_bytes(bad))


def test_parse_segment_missing_field_names_it():
    bad = dict(SEGMENT_OK)
    bad["words"] = [{"text": "a", "start_s": 0.0}]
    with pytest.raises(SchemaError) as err:
        parse_segment(as_bytes(bad))
    assert "end_s" in str(err.value)


def test_parse_segment_wrong_version():
    with pytest.raises(SchemaError):
        parse_segment(as_bytes({**SEGMENT_OK, "version": 2}))


def test_parse_segment_not_json():
    with pytest.raises(SchemaError):
        parse_segment(b"not json {")
    with pytest.raises(SchemaError):
        parse_segment(b"\xff\xfe\x00")


def test_segment_round_trip():
    transcript = parse_segment(as_bytes(SEGMENT_OK))
    again = parse_segment(emit_segment(transcript))
    assert again == transcript


# ---------------------------------------------------------------------------
# Attention files
# ---------------------------------------------------------------------------


def test_parse_attention_round_trip_matrix():
    doc = parse_attention(as_bytes(ATTENTION_OK))
    assert doc.matrix.weights.tolist() == ATTENTION_OK["attention"]
    assert doc.src_tokens == (("a", 0), ("b", 1))
    assert doc.target.tokens == ("x", "y", "z")
    assert doc.target.word_group == (1, 2, 3)
    again = parse_attention(emit_attention(doc))
    assert again.matrix.weights.tolist() == doc.matrix.weights.tolist()
    assert again.src_tokens == doc.src_tokens
    assert again.target == doc.target


def test_parse_attention_normalizes_rows():
    obj = dict(ATTENTION_OK)
    obj["attention"] = [[4.0, 4.0], [1.0, 3.0], [0.0, 0.0]]
    doc = parse_attention(as_bytes(obj))
    assert doc.matrix.weights[0].tolist() == [0.5, 0.5]
    assert doc.matrix.weights[1].tolist() == [0.25, 0.75]
    assert doc.matrix.zero_sum_rows == (2,)


def test_parse_attention_ragged_rows():
    obj = dict(ATTENTION_OK)
    obj["attention"] = [[0.9, 0.1], [0.6], [0.1, 0.9]]
    with pytest.raises(DimensionMismatch):
        parse_attention(as_bytes(obj))


def test_parse_attention_row_count_mismatch():
    obj = dict(ATTENTION_OK)
    obj["attention"] = [[0.9, 0.1], [0.6, 0.4]]
    with pytest.raises(DimensionMismatch):
        parse_attention(as_bytes(obj))


def test_parse_attention_negative_weight():
    obj = dict(ATTENTION_OK)
    obj["attention"] = [[0.9, -0.1], [0.6, 0.4], [0.1, 0.9]]
    with pytest.raises(SchemaError) as err:
        parse_attention(as_bytes(obj))
    assert "attention[0][1]" in str(err.value)


def test_parse_attention_bad_word_group():
    obj = dict(ATTENTION_OK)
    obj["tgt_tokens"] = [
        {"text": "x", "word_group": 1},
        {"text": "y", "word_group": 3},
        {"text": "z", "word_group": 3},
    ]
    with pytest.raises(SchemaError):
        parse_attention(as_bytes(obj))


def test_parse_attention_ignores_meta():
    obj = dict(ATTENTION_OK)
    obj["meta"] = {"model": "whatever", "heads": "mean"}
    doc = parse_attention(as_bytes(obj))
    assert doc.target.tokens == ("x", "y", "z")


# ---------------------------------------------------------------------------
# .pho files
# ---------------------------------------------------------------------------


def test_parse_pho_pitch_line():
    track = parse_pho(b"a 80 50 120\n")
    assert track.entries == (PhonemeTiming("a", 80, ((50.0, 120.0),)),)


def test_parse_pho_pause():
    track = parse_pho(b"_ 300\n")
    entry = track.entries[0]
    assert entry.is_pause
    assert entry.duration_ms == 300


def test_parse_pho_missing_duration():
    with pytest.raises(PhoSyntaxError) as err:
        parse_pho(b"a 80\na\n")
    assert err.value.line == 2


def test_parse_pho_bad_duration():
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a 80.5\n")
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a -80\n")
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a 0\n")


def test_parse_pho_odd_pitch_fields():
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a 80 50\n")


def test_parse_pho_non_finite_pitch():
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a 80 nan 120\n")
    with pytest.raises(PhoSyntaxError):
        parse_pho(b"a 80 50 inf\n")


def test_parse_pho_comments_kept_aside():
    doc = parse_pho_document(b"; phrase 1\na 80\n; phrase 2\nb 90\n")
    assert [c.text for c in doc.comments] == ["phrase 1", "phrase 2"]
    assert [c.entry_index for c in doc.comments] == [0, 1]
    assert len(doc.track.entries) == 2


def test_split_pho_phrases():
    doc = parse_pho_document(b"; phrase 1\na 80\nb 90\n; phrase 2\nc 70\n")
    groups = split_pho_phrases(doc)
    assert [[p.phoneme for p in g] for g in groups] == [["a", "b"], ["c"]]


def test_split_pho_phrases_missing_marker():
    doc = parse_pho_document(b"a 80\n; phrase 1\nb 90\n")
    with pytest.raises(DimensionMismatch):
        split_pho_phrases(doc)


def test_split_pho_phrases_out_of_order():
    doc = parse_pho_document(b"; phrase 2\na 80\n; phrase 1\nb 90\n")
    with pytest.raises(DimensionMismatch):
        split_pho_phrases(doc)


def golden_files():
    return sorted(
        p
        for p in (DATA / "pho").glob("*.pho")
        if not p.name.endswith(".expected.pho")
    )


def test_golden_corpus_is_big_enough():
    assert len(golden_files()) >= 10


@pytest.mark.parametrize("path", golden_files(), ids=lambda p: p.name)
def test_golden_round_trip(path):
    raw = path.read_bytes()
    expected_path = path.with_name(path.name[: -len(".pho")] + ".expected.pho")
    canonical = expected_path.read_bytes() if expected_path.exists() else raw
    assert emit_pho(parse_pho(raw)) == canonical


@st.composite
def tracks(draw):
    n = draw(st.integers(min_value=0, max_value=8))
    entries = []
    for _ in range(n):
        symbol = draw(
            st.text(
                alphabet=st.characters(
                    whitelist_categories=["Ll", "Lu"], max_codepoint=0x2FF
                ),
                min_size=1,
                max_size=3,
            )
        )
        duration = draw(st.integers(min_value=1, max_value=5000))
        k = draw(st.integers(min_value=0, max_value=3))
        percents = sorted(
            draw(
                st.lists(
                    st.floats(min_value=0, max_value=100, allow_nan=False),
                    min_size=k,
                    max_size=k,
                )
            )
        )
        points = tuple(
            (
                pct,
                draw(st.floats(min_value=0, max_value=500, allow_nan=False)),
            )
            for pct in percents
        )
        entries.append(PhonemeTiming(symbol, duration, points))
    return PhonemeTrack(tuple(entries))


@given(tracks())
@settings(max_examples=200)
def test_emit_parse_round_trip(track):
    assert parse_pho(emit_pho(track)) == track


@given(st.binary(max_size=200))
@settings(max_examples=300)
def test_parse_pho_never_aborts(data):
    try:
        parse_pho(data)
    except PhoSyntaxError:
        pass


def test_emit_pho_empty_track():
    assert emit_pho(PhonemeTrack(())) == b""


def test_total_duration_property():
    track = parse_pho((DATA / "pho" / "07_mixed.pho").read_bytes())
    assert track.total_duration_ms == sum(e.duration_ms for e in track.entries)


@given(st.binary(max_size=300))
@settings(max_examples=200)
def test_parse_segment_never_aborts(data):
    try:
        parse_segment(data)
    except (SchemaError, TimingError):
        pass


@given(st.binary(max_size=300))
@settings(max_examples=200)
def test_parse_attention_never_aborts(data):
    try:
        parse_attention(data)
    except (SchemaError, DimensionMismatch):
        pass


def test_parse_segment_rejects_nan_times():
    bad = dict(SEGMENT_OK)
    bad["words"] = [{"text": "a", "start_s": float("nan"), "end_s": 1.0}]
    with pytest.raises(SchemaError):
        parse_segment(json.dumps(bad).encode())


def test_deeply_nested_json_is_schema_error():
    with pytest.raises(SchemaError):
        parse_segment(b"[" * 100_000)
