"""Segmenting a dialogue line into prosodic phrases.

A phrase is a run of voiced words ended by a silent pause.  The only
knob is the pause threshold: a gap between words at or above it becomes
a phrase boundary.
"""

from dubsync import SegmentTranscript, TimedWord, segment_into_phrases

# A dialogue line with word-level timings, as a forced aligner would
# produce them.  Gaps: 50 ms, 300 ms, 80 ms, 450 ms.
line = SegmentTranscript(
    "demo_line",
    (
        TimedWord("what", 0.00, 0.22),
        TimedWord("are", 0.27, 0.40),
        TimedWord("you", 0.70, 0.85),
        TimedWord("doing", 0.93, 1.30),
        TimedWord("here", 1.75, 2.10),
    ),
    lang="en",
)

print("gaps between words (ms):")
print("  ", [round(g * 1000) for g in line.inter_word_gaps_s()])

for threshold in (250, 100, 500):
    phrases = segment_into_phrases(line, pause_threshold_ms=threshold)
    print(f"\nthreshold {threshold} ms -> {len(phrases)} phrase(s)")
    for p in phrases:
        words = " ".join(w.text for w in line.words[slice(*p.word_span)])
        print(
            f"  phrase {p.phrase_index}: {words!r}"
            f"  [{p.start_s:.2f}s - {p.end_s:.2f}s]"
            f"  pause after: {p.trailing_pause_s * 1000:.0f} ms"
        )

# Raising the threshold can only merge phrases, never split them.
counts = [
    len(segment_into_phrases(line, t)) for t in (50, 100, 250, 400, 500, 1000)
]
print("\nphrase counts over a rising threshold sweep:", counts)
