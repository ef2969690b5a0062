"""Bending predicted phoneme durations onto the source phrase durations.

The bending ratio is desired duration / predicted duration per phrase.
Scaled durations are integers; largest-remainder rounding guarantees the
phrase total lands exactly on its target, with no drift anywhere.
"""

from dubsync import (
    DurationPlan,
    PhonemeTiming,
    PlanEntry,
    apply_bend,
    assemble_track,
    bending_ratio,
)

# What the TTS front-end predicted for the translated phrase.
predicted = [
    PhonemeTiming("s", 103),
    PhonemeTiming("i", 147, pitch_points=((50.0, 180.0),)),
    PhonemeTiming("g", 80),
    PhonemeTiming("e", 120),
]
predicted_total = sum(p.duration_ms for p in predicted)
print(f"predicted phrase duration: {predicted_total} ms")

# The source phrase lasted 360 ms, so speech must speed up.
bend = bending_ratio(360, predicted)
print(f"bending ratio: {bend.ratio:.4f} (raw {bend.raw_ratio:.4f})")

scaled = apply_bend(predicted, bend.ratio)
for before, after in zip(predicted, scaled):
    print(f"  {before.phoneme}: {before.duration_ms} ms -> {after.duration_ms} ms")
print(f"scaled total: {sum(p.duration_ms for p in scaled)} ms (exactly 360)")

# Clamping caps extreme ratios; the report keeps the raw value.
bend = bending_ratio(1800, predicted, clamp=(0.5, 2.0))
print(
    f"\nextreme phrase: raw ratio {bend.raw_ratio:.2f} clamped to "
    f"{bend.ratio:.2f} (clamp_applied={bend.clamp_applied})"
)

# A whole track: two phrases joined by the source's 300 ms pause.
plan = DurationPlan(
    (
        PlanEntry(label=1, desired_duration_ms=360, trailing_pause_ms=300),
        PlanEntry(label=2, desired_duration_ms=500, trailing_pause_ms=0),
    )
)
second = [PhonemeTiming("a", 100), PhonemeTiming("o", 150), PhonemeTiming("r", 250)]
track = assemble_track(plan, [predicted, second])

print("\nassembled track:")
for entry in track.entries:
    kind = "pause" if entry.is_pause else "phone"
    print(f"  {kind}  {entry.phoneme:>2}  {entry.duration_ms} ms")
print(f"track total: {track.total_duration_ms} ms == plan total {plan.total_ms} ms")
