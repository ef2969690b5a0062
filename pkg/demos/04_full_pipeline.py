"""The whole pipeline on the bundled fixture, stage by stage.

Each stage reads and writes a file, so everything is replayable without
the MT or TTS systems.  The same run is available as one command:

    dubsync pipeline segment.json attention.json predicted.pho --out synced.pho
"""

import json
import tempfile
from pathlib import Path

from dubsync.cli import main

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "data" / "pipeline"

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    phrases = tmp / "phrases.json"
    labeling = tmp / "labeling.json"
    synced = tmp / "synced.pho"
    report = tmp / "report.json"

    main(["segment", str(FIXTURE / "demo_0001.segment.json"), "--out", str(phrases)])
    doc = json.loads(phrases.read_text())
    print(f"1. segment: {len(doc['phrases'])} phrases")
    for p in doc["phrases"]:
        print(
            f"     phrase {p['index']}: {p['start_s']}s - {p['end_s']}s"
            f" (+{p['trailing_pause_s'] * 1000:.0f} ms pause)"
        )

    main(
        [
            "align",
            str(phrases),
            str(FIXTURE / "demo_0001.attention.json"),
            "--out",
            str(labeling),
        ]
    )
    doc = json.loads(labeling.read_text())
    print(f"2. align: labels {doc['labels']} out of {doc['candidate_count']} candidates")

    main(
        [
            "sync",
            str(labeling),
            str(phrases),
            str(FIXTURE / "demo_0001.predicted.pho"),
            "--out",
            str(synced),
            "--report",
            str(report),
        ]
    )
    doc = json.loads(report.read_text())
    print("3. sync: bending ratios", [p["ratio"] for p in doc["phrases"]])
    print(f"   track total {doc['track_total_ms']} ms == plan {doc['plan_total_ms']} ms")

    print("\nsynced.pho:")
    print(synced.read_text())

    golden = (FIXTURE / "demo_0001.synced.golden.pho").read_bytes()
    assert synced.read_bytes() == golden
    print("matches the golden output byte for byte.")
