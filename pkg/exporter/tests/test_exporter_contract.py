"""Contract tests: every emitted file must satisfy the attention schema
the synchronization pipeline consumes, with rows summing to 1 and word
groupings that reconstruct the source sentences exactly."""

import json
from pathlib import Path

import pytest

from dubsync.formats import parse_attention

from attention_exporter.backends import LexiconBackend
from attention_exporter.cli import main
from attention_exporter.errors import ExporterError
from attention_exporter.exporter import ExportRequest, export_attention, read_sentences
from attention_exporter.subwords import detokenize, normalize

DATA = Path(__file__).parent / "data"
SMOKE = DATA / "smoke_sentences.txt"


def check_contract(path: Path, sentence: str):
    """The acceptance contract for one emitted file."""
    raw = json.loads(path.read_text("utf-8"))
    for i, row in enumerate(raw["attention"]):
        assert sum(row) == pytest.approx(1.0, abs=1e-4), f"row {i} of {path.name}"

    doc = parse_attention(path.read_bytes())  # raises on any schema violation
    assert doc.matrix.n_target == len(doc.target.tokens)
    assert doc.matrix.n_source == len(doc.src_tokens)

    # Word groups must rebuild the source sentence exactly.
    words = normalize(sentence).split()
    indices = sorted({index for _, index in doc.src_tokens})
    assert indices == list(range(len(words)))
    rebuilt = [
        detokenize([text for text, index in doc.src_tokens if index == w])
        for w in indices
    ]
    assert rebuilt == words


def test_smoke_set_has_twenty_sentences():
    assert len(read_sentences(SMOKE)) == 20


def test_lexicon_smoke_set_contract(tmp_path):
    sentences = read_sentences(SMOKE)
    request = ExportRequest(tuple(sentences), "lexicon")
    written = export_attention(request, LexiconBackend(), tmp_path)
    assert len(written) == 20
    by_id = dict(sentences)
    for path in written:
        segment_id = path.name[: -len(".attention.json")]
        check_contract(path, by_id[segment_id])
    print("\nACCEPTANCE exporter contract (lexicon backend, 20 sentences): PASS")


def test_lexicon_translation_is_deterministic(tmp_path):
    sentences = read_sentences(SMOKE)[:5]
    request = ExportRequest(tuple(sentences), "lexicon")
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    a = export_attention(request, LexiconBackend(), a_dir)
    b = export_attention(request, LexiconBackend(), b_dir)
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_exported_file_drives_the_pipeline(tmp_path):
    """End to end across the component boundary: exporter output + a
    segment transcript -> phrase labeling via the primary CLI."""
    from dubsync.cli import main as dubsync_main

    request = ExportRequest((("seg_01", "keep going now"),), "lexicon")
    (attention_path,) = export_attention(request, LexiconBackend(), tmp_path)

    segment_path = tmp_path / "seg.json"
    segment_path.write_text(
        json.dumps(
            {
                "version": 1,
                "segment_id": "seg_01",
                "lang": "en",
                "words": [
                    {"text": "keep", "start_s": 0.0, "end_s": 0.5},
                    {"text": "going", "start_s": 0.55, "end_s": 1.0},
                    {"text": "now", "start_s": 1.3, "end_s": 1.8},
                ],
            }
        )
    )
    phrases_path = tmp_path / "phrases.json"
    labeling_path = tmp_path / "labeling.json"
    assert dubsync_main(["segment", str(segment_path), "--out", str(phrases_path)]) == 0
    assert (
        dubsync_main(
            ["align", str(phrases_path), str(attention_path), "--out", str(labeling_path)]
        )
        == 0
    )
    labels = json.loads(labeling_path.read_text())["labels"]
    assert labels[0] == 1
    assert labels[-1] == 2
    assert all(b - a in (0, 1) for a, b in zip(labels, labels[1:]))


def test_empty_request_rejected():
    with pytest.raises(ExporterError):
        ExportRequest((), "lexicon")


def test_duplicate_segment_ids_rejected():
    with pytest.raises(ExporterError):
        ExportRequest((("a", "x"), ("a", "y")), "lexicon")


def test_cli_lexicon(tmp_path, capsys):
    out_dir = tmp_path / "attn"
    code = main(["--model", "lexicon", "--in", str(SMOKE), "--out-dir", str(out_dir)])
    assert code == 0
    files = sorted(out_dir.glob("*.attention.json"))
    assert len(files) == 20
    listed = capsys.readouterr().out.strip().splitlines()
    assert len(listed) == 20


def test_cli_empty_sentences_file(tmp_path, capsys):
    empty = tmp_path / "none.txt"
    empty.write_text("# only a comment\n\n")
    code = main(
        ["--model", "lexicon", "--in", str(empty), "--out-dir", str(tmp_path / "o")]
    )
    assert code == 1
    assert not (tmp_path / "o").exists() or not list((tmp_path / "o").iterdir())


def test_cli_missing_file(tmp_path, capsys):
    code = main(
        ["--model", "lexicon", "--in", str(tmp_path / "nope.txt"), "--out-dir", str(tmp_path)]
    )
    assert code == 1


def test_unknown_words_pass_through(tmp_path):
    request = ExportRequest((("x", "zyzzyva keeps walking"),), "lexicon")
    (path,) = export_attention(request, LexiconBackend(), tmp_path)
    check_contract(path, "zyzzyva keeps walking")
    meta = json.loads(path.read_text())["meta"]
    assert "zyzzyva" in meta["translation"]
