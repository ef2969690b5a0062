"""Corpus analyses over parallel (source, dubbed) segment pairs.

How often do source pauses survive into the dubbed track, and how do
syllable budgets compare across the language pair?
"""

from pathlib import Path

from dubsync import (
    bend_ratio_distribution,
    load_parallel_corpus,
    pause_overlap_rate,
    syllable_ratio_stats,
)
from dubsync.stats import transcript_syllables

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "corpus"

pairs = load_parallel_corpus(CORPUS)
print(f"loaded {len(pairs)} parallel segment pairs\n")

print("pause overlap rate by minimum source pause length:")
for min_pause in (0.1, 0.15, 0.25):
    try:
        rate = pause_overlap_rate(pairs, min_pause)
        print(f"  >= {min_pause:4.2f} s: {rate:.2f}")
    except Exception as exc:
        print(f"  >= {min_pause:4.2f} s: ({exc})")

print("\nper-pair syllable counts (source -> target):")
for pair in pairs:
    s = transcript_syllables(pair.source)
    t = transcript_syllables(pair.target)
    print(f"  {pair.segment_id}: {s} -> {t}  (ratio {t / s:.2f})")

summary = syllable_ratio_stats(pairs)
print(f"\nsyllable ratio: mean {summary.mean:.2f}, std {summary.std:.2f}")

# Bending ratios from a pipeline run (here: a plausible hand sample).
ratios = [0.8, 1.0, 1.27, 1.6, 0.93, 1.1]
dist = bend_ratio_distribution(ratios, bins=5)
print(
    f"bend ratios: mean {dist.ratio.mean:.3f}, "
    f"log-scale mean {dist.log_ratio.mean:.3f}"
)
print("histogram counts:", list(dist.ratio.histogram.counts))
