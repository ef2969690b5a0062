"""Duration conditioning: map source phrase durations onto predicted
phoneme tracks.

Each target phrase inherits the duration and trailing pause of the source
phrase with the same label.  A bending ratio (desired / predicted) says
how much the phrase's phonemes must speed up or slow down; durations are
then integer-scaled with largest-remainder rounding so every phrase total
lands exactly on its target and no drift accumulates across the track.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatch, EmptyPhrase, PlanDegenerate
from .prosody import ProsodicPhrase
from .alignment import AlignmentResult

#: Conventional silence symbol in phoneme files.
PAUSE_SYMBOL = "_"

#: Suggested clamp range for callers that enable clamping.
DEFAULT_CLAMP = (0.5, 2.0)


@dataclass(frozen=True)
class PhonemeTiming:
    """One phoneme (or silence) with an integer duration in milliseconds.

    ``pitch_points`` are ``(percent, f0_hz)`` pairs; percents lie in
    [0, 100] and never decrease.  They ride along untouched when
    durations are rescaled.
    """

    phoneme: str
    duration_ms: int
    pitch_points: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not self.phoneme or any(c.isspace() for c in self.phoneme):
            raise ValueError(f"bad phoneme symbol {self.phoneme!r}")
        if self.phoneme.startswith(";"):
            raise ValueError("phoneme symbol may not start with ';'")
        if not isinstance(self.duration_ms, int) or self.duration_ms < 1:
            raise ValueError(
                f"phoneme {self.phoneme!r}: duration must be an integer >= 1 ms"
            )
        points = tuple((float(p), float(f)) for p, f in self.pitch_points)
        object.__setattr__(self, "pitch_points", points)
        prev = -math.inf
        for pct, f0 in points:
            if not (math.isfinite(pct) and math.isfinite(f0)):
                raise ValueError("pitch points must be finite")
            if not 0.0 <= pct <= 100.0:
                raise ValueError(f"pitch percent {pct} outside [0, 100]")
            if pct < prev:
                raise ValueError("pitch percents must be non-decreasing")
            if f0 < 0:
                raise ValueError("f0 must be >= 0")
            prev = pct

    @property
    def is_pause(self) -> bool:
        return self.phoneme == PAUSE_SYMBOL

    def with_duration(self, duration_ms: int) -> "PhonemeTiming":
        return PhonemeTiming(self.phoneme, duration_ms, self.pitch_points)


def total_duration_ms(phonemes: Sequence[PhonemeTiming]) -> int:
    return sum(p.duration_ms for p in phonemes)


@dataclass(frozen=True)
class PlanEntry:
    """Desired duration and trailing pause for one target phrase."""

    label: int
    desired_duration_ms: int
    trailing_pause_ms: int

    def __post_init__(self):
        if self.desired_duration_ms < 1:
            raise PlanDegenerate(
                f"phrase {self.label}: desired duration rounds to "
                f"{self.desired_duration_ms} ms"
            )
        if self.trailing_pause_ms < 0:
            raise ValueError("trailing_pause_ms must be >= 0")


@dataclass(frozen=True)
class DurationPlan:
    """Per-phrase durational targets, in label order (1..K)."""

    entries: tuple[PlanEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("plan must have at least one entry")
        for k, entry in enumerate(self.entries, start=1):
            if entry.label != k:
                raise ValueError(f"entry {k} carries label {entry.label}")
        if self.entries[-1].trailing_pause_ms != 0:
            raise ValueError("final phrase must have no trailing pause")

    @property
    def n_phrases(self) -> int:
        return len(self.entries)

    @property
    def total_ms(self) -> int:
        return sum(e.desired_duration_ms + e.trailing_pause_ms for e in self.entries)


@dataclass(frozen=True)
class BendResult:
    """Bending ratio for one phrase, before and after optional clamping."""

    ratio: float
    raw_ratio: float
    clamp_applied: bool


@dataclass(frozen=True)
class PhonemeTrack:
    """Final sequence of phonemes and explicit pause entries."""

    entries: tuple[PhonemeTiming, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    @property
    def total_duration_ms(self) -> int:
        return total_duration_ms(self.entries)

    @property
    def phonemes(self) -> tuple[PhonemeTiming, ...]:
        return tuple(p for p in self.entries if not p.is_pause)

    @property
    def pauses(self) -> tuple[PhonemeTiming, ...]:
        return tuple(p for p in self.entries if p.is_pause)


def build_duration_plan(
    source_phrases: Sequence[ProsodicPhrase], alignment: AlignmentResult
) -> DurationPlan:
    """Copy source phrase durations and pauses onto the aligned target
    phrases (label k maps to source phrase k)."""
    k = alignment.best.n_phrases
    if k != len(source_phrases):
        raise DimensionMismatch(
            f"alignment has {k} phrases but {len(source_phrases)} source "
            "phrases were given"
        )
    entries = []
    for phrase in source_phrases:
        entries.append(
            PlanEntry(
                label=phrase.phrase_index,
                desired_duration_ms=round(phrase.duration_s * 1000.0),
                trailing_pause_ms=round(phrase.trailing_pause_s * 1000.0),
            )
        )
    return DurationPlan(tuple(entries))


def bending_ratio(
    desired_duration_ms: int,
    predicted_phonemes: Sequence[PhonemeTiming],
    clamp: tuple[float, float] | None = None,
) -> BendResult:
    """Desired phrase duration divided by the predicted phrase duration.

    With ``clamp=(lo, hi)`` the applied ratio is limited to that range and
    ``clamp_applied`` reports whether the limit was hit; the raw ratio is
    kept for diagnostics.  Clamping trades exact overlap for less extreme
    speed-ups/slow-downs, so it is off unless requested.
    """
    if not predicted_phonemes:
        raise EmptyPhrase("phrase has no predicted phonemes")
    if desired_duration_ms < 1:
        raise PlanDegenerate(f"desired duration {desired_duration_ms} ms")
    predicted_total = total_duration_ms(predicted_phonemes)
    raw = desired_duration_ms / predicted_total
    ratio = raw
    clamped = False
    if clamp is not None:
        lo, hi = clamp
        if not (0 < lo < hi):
            raise ValueError(f"invalid clamp range ({lo}, {hi})")
        ratio = min(max(raw, lo), hi)
        clamped = ratio != raw
    return BendResult(ratio=ratio, raw_ratio=raw, clamp_applied=clamped)


def apply_bend(
    phonemes: Sequence[PhonemeTiming], ratio: float
) -> list[PhonemeTiming]:
    """Scale every duration by ``ratio`` with largest-remainder rounding.

    The output total equals ``round(ratio * input total)`` exactly: each
    scaled duration is floored and the leftover milliseconds go to the
    largest fractional remainders (ties to the earliest phoneme).  No
    duration drops below 1 ms; any deficit that bumping causes is taken
    back from the longest phonemes.  Pitch points pass through unchanged.
    """
    if ratio <= 0 or not math.isfinite(ratio):
        raise ValueError(f"ratio must be a positive finite number, got {ratio}")
    if not phonemes:
        return []

    input_total = total_duration_ms(phonemes)
    target_total = round(ratio * input_total)
    n = len(phonemes)
    if target_total < n:
        raise PlanDegenerate(
            f"target of {target_total} ms cannot hold {n} phonemes of "
            ">= 1 ms each"
        )

    raw = [ratio * p.duration_ms for p in phonemes]
    durations = [math.floor(r) for r in raw]
    remainders = [r - d for r, d in zip(raw, durations)]

    leftover = target_total - sum(durations)
    # Hand out the missing milliseconds, biggest remainder first.
    order = sorted(range(n), key=lambda i: (-remainders[i], i))
    for i in order[:leftover]:
        durations[i] += 1

    # Enforce the 1 ms minimum, pulling the excess from the longest entries.
    deficit = 0
    for i in range(n):
        if durations[i] < 1:
            deficit += 1 - durations[i]
            durations[i] = 1
    while deficit > 0:
        donor = max(range(n), key=lambda i: (durations[i], -i))
        if durations[donor] <= 1:  # pragma: no cover - guarded by target >= n
            raise PlanDegenerate("cannot redistribute below 1 ms per phoneme")
        take = min(deficit, durations[donor] - 1)
        durations[donor] -= take
        deficit -= take

    return [p.with_duration(d) for p, d in zip(phonemes, durations)]


def assemble_track(
    plan: DurationPlan,
    per_phrase_phonemes: Sequence[Sequence[PhonemeTiming]],
    clamp: tuple[float, float] | None = None,
    lead_silence_ms: int = 0,
) -> PhonemeTrack:
    """Bend each phrase onto its planned duration and join the phrases
    with explicit pause entries.

    Without clamping the track total equals the plan total exactly.  A
    clamped phrase keeps the clamped ratio's total instead, which is the
    point of clamping.
    """
    if len(per_phrase_phonemes) != plan.n_phrases:
        raise DimensionMismatch(
            f"plan has {plan.n_phrases} phrases but "
            f"{len(per_phrase_phonemes)} phoneme lists were given"
        )
    if lead_silence_ms < 0:
        raise ValueError("lead_silence_ms must be >= 0")

    entries: list[PhonemeTiming] = []
    if lead_silence_ms > 0:
        entries.append(PhonemeTiming(PAUSE_SYMBOL, lead_silence_ms))
    for entry, phonemes in zip(plan.entries, per_phrase_phonemes):
        bend = bending_ratio(entry.desired_duration_ms, phonemes, clamp)
        entries.extend(apply_bend(phonemes, bend.ratio))
        if entry.trailing_pause_ms > 0:
            entries.append(PhonemeTiming(PAUSE_SYMBOL, entry.trailing_pause_ms))
    return PhonemeTrack(tuple(entries))
