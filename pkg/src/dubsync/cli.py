"""Command-line pipeline: segment -> align -> sync, plus corpus analysis.

Every stage reads and writes plain files, so each intermediate artifact
can be inspected and replayed without the MT or TTS systems.  Outputs are
written atomically (temp file + rename) and are byte-deterministic for
fixed inputs and flags.  Exit codes: 0 success, 1 domain error, 2 usage
error.  Set ``DUBSYNC_LOG`` to a level name to turn on logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from . import alignment, formats, prosody, stats, timing
from .errors import DimensionMismatch, DubsyncError, EmptyCorpus, SchemaError

log = logging.getLogger("dubsync")


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _dump_json(obj) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Stage implementations (file bytes in, file bytes out)
# ---------------------------------------------------------------------------


def run_segment(segment_bytes: bytes, pause_threshold_ms: float) -> bytes:
    transcript = formats.parse_segment(segment_bytes)
    phrases = prosody.segment_into_phrases(transcript, pause_threshold_ms)
    log.info("segment %s: %d phrases", transcript.segment_id, len(phrases))
    return formats.emit_phrases(transcript, phrases, pause_threshold_ms)


def run_align(
    phrases_bytes: bytes,
    attention_bytes: bytes,
    epsilon: float,
    max_candidates: int,
) -> bytes:
    phrase_doc = formats.parse_phrases(phrases_bytes)
    attention_doc = formats.parse_attention(attention_bytes)

    transcript = prosody.SegmentTranscript(
        phrase_doc.segment_id, phrase_doc.words, lang=phrase_doc.lang
    )
    source = prosody.label_source_tokens(
        transcript, phrase_doc.phrases, attention_doc.src_tokens
    )
    result = alignment.align_phrases(
        attention_doc.matrix,
        source,
        attention_doc.target,
        epsilon=epsilon,
        max_candidates=max_candidates,
    )
    log.info(
        "align %s: best %s out of %d candidates",
        phrase_doc.segment_id,
        list(result.best.labels),
        result.candidate_count,
    )
    return formats.emit_labeling(phrase_doc.segment_id, result)


def run_sync(
    labeling_bytes: bytes,
    phrases_bytes: bytes,
    predicted_bytes: bytes,
    clamp: tuple[float, float] | None,
    lead_silence_ms: int,
) -> tuple[bytes, dict]:
    """Build the synced track; returns (pho bytes, report fragment)."""
    labeling_doc = formats.parse_labeling(labeling_bytes)
    phrase_doc = formats.parse_phrases(phrases_bytes)
    if labeling_doc.segment_id != phrase_doc.segment_id:
        raise SchemaError(
            "segment_id",
            f"labeling is for {labeling_doc.segment_id!r} but phrases are "
            f"for {phrase_doc.segment_id!r}",
        )

    plan = timing.build_duration_plan(phrase_doc.phrases, labeling_doc.result)
    pho_doc = formats.parse_pho_document(predicted_bytes)
    groups = formats.split_pho_phrases(pho_doc)
    if len(groups) != plan.n_phrases:
        raise DimensionMismatch(
            f"predicted track has {len(groups)} marked phrases but the plan "
            f"has {plan.n_phrases}"
        )

    diagnostics: list[str] = []
    phrase_rows = []
    for entry, phonemes in zip(plan.entries, groups):
        bend = timing.bending_ratio(entry.desired_duration_ms, phonemes, clamp)
        if bend.clamp_applied:
            diagnostics.append(
                f"phrase {entry.label}: ClampApplied raw={bend.raw_ratio!r} "
                f"applied={bend.ratio!r}"
            )
        phrase_rows.append(
            {
                "label": entry.label,
                "desired_ms": entry.desired_duration_ms,
                "trailing_pause_ms": entry.trailing_pause_ms,
                "predicted_ms": timing.total_duration_ms(phonemes),
                "ratio": bend.ratio,
                "raw_ratio": bend.raw_ratio,
                "clamp_applied": bend.clamp_applied,
            }
        )
    track = timing.assemble_track(plan, groups, clamp, lead_silence_ms)
    report = {
        "segment_id": phrase_doc.segment_id,
        "alignment": {
            "labels": list(labeling_doc.result.best.labels),
            "log_score": labeling_doc.result.best.log_score,
            "candidate_count": labeling_doc.result.candidate_count,
        },
        "phrases": phrase_rows,
        "plan_total_ms": plan.total_ms,
        "track_total_ms": track.total_duration_ms,
        "diagnostics": diagnostics,
    }
    log.info(
        "sync %s: track %d ms vs plan %d ms",
        phrase_doc.segment_id,
        track.total_duration_ms,
        plan.total_ms,
    )
    return formats.emit_pho(track), report


def run_pipeline(
    segment_bytes: bytes,
    attention_bytes: bytes,
    predicted_bytes: bytes,
    pause_threshold_ms: float,
    epsilon: float,
    max_candidates: int,
    clamp: tuple[float, float] | None,
    lead_silence_ms: int,
) -> tuple[bytes, bytes]:
    """Chain the three stages; returns (synced pho bytes, report bytes).

    The stages communicate through their serialized artifacts, so the
    result is byte-identical to running the commands one by one.
    """
    phrases_bytes = run_segment(segment_bytes, pause_threshold_ms)
    labeling_bytes = run_align(
        phrases_bytes, attention_bytes, epsilon, max_candidates
    )
    synced, report = run_sync(
        labeling_bytes, phrases_bytes, predicted_bytes, clamp, lead_silence_ms
    )
    report_full = {
        "version": formats.SCHEMA_VERSION,
        "config": {
            "pause_threshold_ms": pause_threshold_ms,
            "epsilon": epsilon,
            "max_candidates": max_candidates,
            "clamp": list(clamp) if clamp else None,
            "lead_silence_ms": lead_silence_ms,
        },
        **report,
    }
    return synced, _dump_json(report_full)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_segment(args) -> int:
    out = run_segment(Path(args.segment).read_bytes(), args.pause_threshold_ms)
    _atomic_write(Path(args.out), out)
    return 0


def _cmd_align(args) -> int:
    out = run_align(
        Path(args.phrases).read_bytes(),
        Path(args.attention).read_bytes(),
        args.epsilon,
        args.max_candidates,
    )
    _atomic_write(Path(args.out), out)
    return 0


def _clamp_from_args(parser: argparse.ArgumentParser, args) -> tuple[float, float] | None:
    if (args.clamp_min is None) != (args.clamp_max is None):
        parser.error("--clamp-min and --clamp-max must be given together")
    if args.clamp_min is None:
        return None
    if not args.clamp_min < args.clamp_max:
        parser.error("--clamp-min must be smaller than --clamp-max")
    return (args.clamp_min, args.clamp_max)


def _cmd_sync(args, parser) -> int:
    synced, report = run_sync(
        Path(args.labeling).read_bytes(),
        Path(args.phrases).read_bytes(),
        Path(args.predicted).read_bytes(),
        _clamp_from_args(parser, args),
        args.lead_silence_ms,
    )
    _atomic_write(Path(args.out), synced)
    if args.report:
        _atomic_write(
            Path(args.report),
            _dump_json({"version": formats.SCHEMA_VERSION, **report}),
        )
    return 0


def _default_report_path(out: Path) -> Path:
    stem = out.name[: -len(out.suffix)] if out.suffix else out.name
    return out.with_name(stem + ".report.json")


def _pipeline_one(
    stem: str,
    segment: Path,
    attention: Path,
    predicted: Path,
    out: Path,
    report_path: Path,
    args,
    clamp,
) -> None:
    synced, report = run_pipeline(
        segment.read_bytes(),
        attention.read_bytes(),
        predicted.read_bytes(),
        pause_threshold_ms=args.pause_threshold_ms,
        epsilon=args.epsilon,
        max_candidates=args.max_candidates,
        clamp=clamp,
        lead_silence_ms=args.lead_silence_ms,
    )
    _atomic_write(out, synced)
    _atomic_write(report_path, report)
    log.info("pipeline %s: wrote %s", stem, out)


def _cmd_pipeline(args, parser) -> int:
    clamp = _clamp_from_args(parser, args)
    if args.batch:
        if args.segment or args.attention or args.predicted:
            parser.error("--batch replaces the positional file arguments")
        if not args.out_dir:
            parser.error("--batch requires --out-dir")
        batch = Path(args.batch)
        out_dir = Path(args.out_dir)
        stems = sorted(
            p.name[: -len(".segment.json")]
            for p in batch.glob("*.segment.json")
        )
        if not stems:
            raise EmptyCorpus(f"no *.segment.json files in {batch}")
        failures = []

        def job(stem: str) -> None:
            _pipeline_one(
                stem,
                batch / f"{stem}.segment.json",
                batch / f"{stem}.attention.json",
                batch / f"{stem}.predicted.pho",
                out_dir / f"{stem}.synced.pho",
                out_dir / f"{stem}.report.json",
                args,
                clamp,
            )

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            for stem, future in [(s, pool.submit(job, s)) for s in stems]:
                try:
                    future.result()
                except DubsyncError as exc:
                    failures.append((stem, exc))
        for stem, exc in failures:
            print(f"{stem}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1 if failures else 0

    if not (args.segment and args.attention and args.predicted):
        parser.error("segment, attention and predicted files are required")
    if not args.out:
        parser.error("--out is required")
    out = Path(args.out)
    report_path = Path(args.report) if args.report else _default_report_path(out)
    _pipeline_one(
        "pipeline",
        Path(args.segment),
        Path(args.attention),
        Path(args.predicted),
        out,
        report_path,
        args,
        clamp,
    )
    return 0


def _cmd_analyze(args) -> int:
    directory = Path(args.corpus)
    if args.metric == "bend-ratio":
        ratios = []
        for path in sorted(directory.glob("*.report.json")):
            report = json.loads(path.read_text("utf-8"))
            ratios.extend(row["ratio"] for row in report.get("phrases", []))
        if not ratios:
            raise EmptyCorpus(f"no *.report.json files with phrases in {directory}")
        dist = stats.bend_ratio_distribution(ratios, bins=args.bins)
        rows = [
            ("metric", "bend_ratio"),
            ("count", str(dist.ratio.count)),
            ("mean", f"{dist.ratio.mean:.6g}"),
            ("std", f"{dist.ratio.std:.6g}"),
            ("log mean", f"{dist.log_ratio.mean:.6g}"),
            ("log std", f"{dist.log_ratio.std:.6g}"),
        ]
        payload = {
            "metric": "bend_ratio",
            "ratio": dist.ratio.as_dict(),
            "log_ratio": dist.log_ratio.as_dict(),
        }
    else:
        pairs = stats.load_parallel_corpus(directory)
        if not pairs:
            raise EmptyCorpus(f"no *.src.json/*.tgt.json pairs in {directory}")
        if args.metric == "pause-overlap":
            rate = stats.pause_overlap_rate(pairs, args.min_pause_s)
            rows = [
                ("metric", "pause_overlap"),
                ("pairs", str(len(pairs))),
                ("min pause (s)", f"{args.min_pause_s:g}"),
                ("overlap rate", f"{rate:.6g}"),
            ]
            payload = {
                "metric": "pause_overlap",
                "pairs": len(pairs),
                "min_pause_s": args.min_pause_s,
                "rate": rate,
            }
        else:  # syllable-ratio
            summary = stats.syllable_ratio_stats(pairs, bins=args.bins)
            rows = [
                ("metric", "syllable_ratio"),
                ("pairs", str(summary.count)),
                ("mean", f"{summary.mean:.6g}"),
                ("std", f"{summary.std:.6g}"),
            ]
            payload = {"metric": "syllable_ratio", **summary.as_dict()}

    print(stats.render_table(rows))
    if args.out:
        _atomic_write(Path(args.out), _dump_json(payload))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_clamp_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--clamp-min",
        type=float,
        default=None,
        help="lower bending-ratio limit (suggested 0.5; off by default)",
    )
    sub.add_argument(
        "--clamp-max",
        type=float,
        default=None,
        help="upper bending-ratio limit (suggested 2.0; off by default)",
    )
    sub.add_argument(
        "--lead-silence-ms",
        type=int,
        default=0,
        help="silence inserted before the first phrase",
    )


def _add_align_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--epsilon",
        type=float,
        default=alignment.DEFAULT_EPSILON,
        help="per-step floor on masked attention mass",
    )
    sub.add_argument(
        "--max-candidates",
        type=int,
        default=alignment.DEFAULT_MAX_CANDIDATES,
        help="cap on the admissible labeling count",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dubsync",
        description="Synchronize dubbed speech with source dialogue phrasing.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    seg = commands.add_parser("segment", help="split a transcript into phrases")
    seg.add_argument("segment", help="segment JSON file")
    seg.add_argument("--out", required=True, help="phrases JSON output")
    seg.add_argument(
        "--pause-threshold-ms",
        type=float,
        default=prosody.DEFAULT_PAUSE_THRESHOLD_MS,
        help="gaps at or above this many ms break phrases",
    )

    ali = commands.add_parser("align", help="transfer phrase labels to the translation")
    ali.add_argument("phrases", help="phrases JSON from 'segment'")
    ali.add_argument("attention", help="attention JSON file")
    ali.add_argument("--out", required=True, help="labeling JSON output")
    _add_align_flags(ali)

    syn = commands.add_parser("sync", help="bend predicted phonemes onto the plan")
    syn.add_argument("labeling", help="labeling JSON from 'align'")
    syn.add_argument("phrases", help="phrases JSON from 'segment'")
    syn.add_argument("predicted", help="predicted .pho with '; phrase k' markers")
    syn.add_argument("--out", required=True, help="synced .pho output")
    syn.add_argument("--report", default=None, help="optional report JSON output")
    _add_clamp_flags(syn)

    pipe = commands.add_parser("pipeline", help="run segment, align and sync in one go")
    pipe.add_argument("segment", nargs="?", help="segment JSON file")
    pipe.add_argument("attention", nargs="?", help="attention JSON file")
    pipe.add_argument("predicted", nargs="?", help="predicted .pho file")
    pipe.add_argument("--out", help="synced .pho output")
    pipe.add_argument("--report", default=None, help="report JSON output")
    pipe.add_argument("--batch", default=None, help="directory of *.segment.json triples")
    pipe.add_argument("--out-dir", default=None, help="output directory for --batch")
    pipe.add_argument("--jobs", type=int, default=4, help="parallel workers for --batch")
    pipe.add_argument(
        "--pause-threshold-ms",
        type=float,
        default=prosody.DEFAULT_PAUSE_THRESHOLD_MS,
        help="gaps at or above this many ms break phrases",
    )
    _add_align_flags(pipe)
    _add_clamp_flags(pipe)

    ana = commands.add_parser("analyze", help="corpus statistics")
    ana.add_argument("corpus", help="directory of paired segments or reports")
    ana.add_argument(
        "--metric",
        required=True,
        choices=["pause-overlap", "syllable-ratio", "bend-ratio"],
    )
    ana.add_argument(
        "--min-pause-s",
        type=float,
        default=0.1,
        help="minimum source pause length for pause-overlap",
    )
    ana.add_argument("--bins", type=int, default=10, help="histogram bins")
    ana.add_argument("--out", default=None, help="optional summary JSON output")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("DUBSYNC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "segment":
            return _cmd_segment(args)
        if args.command == "align":
            return _cmd_align(args)
        if args.command == "sync":
            return _cmd_sync(args, parser)
        if args.command == "pipeline":
            return _cmd_pipeline(args, parser)
        if args.command == "analyze":
            return _cmd_analyze(args)
        raise AssertionError(f"unhandled command {args.command}")
    except DubsyncError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
