"""Prosodic phrase synchronization for machine dubbing.

The pipeline takes a word-aligned transcript of a dialogue line, splits
it into prosodic phrases at silent pauses, transfers the phrase structure
onto the translated token sequence by scoring monotonic labelings against
the translation's attention matrix, and rescales TTS-predicted phoneme
durations so the synthesized speech occupies the source phrases' time
intervals.
"""

from .alignment import (
    AlignmentResult,
    AttentionMatrix,
    CandidateLabeling,
    TargetTokens,
    align_phrases,
    count_labelings,
    enumerate_labelings,
    score_labeling,
)
from .errors import (
    AlignmentInfeasible,
    CandidateExplosion,
    DimensionMismatch,
    DubsyncError,
    EmptyCorpus,
    EmptyPhrase,
    EmptyTranscript,
    InconsistentTokenization,
    NonPositiveRatio,
    PhoSyntaxError,
    PlanDegenerate,
    SchemaError,
    TimingError,
    UnsupportedLanguage,
)
from .formats import (
    AttentionDocument,
    PhoDocument,
    emit_attention,
    emit_pho,
    emit_segment,
    parse_attention,
    parse_pho,
    parse_pho_document,
    parse_segment,
    split_pho_phrases,
)
from .prosody import (
    DEFAULT_PAUSE_THRESHOLD_MS,
    ProsodicPhrase,
    SegmentTranscript,
    SourceLabeledSentence,
    TimedWord,
    label_source_tokens,
    segment_into_phrases,
)
from .stats import (
    ParallelSegmentPair,
    StatsSummary,
    bend_ratio_distribution,
    count_syllables,
    load_parallel_corpus,
    pause_overlap_rate,
    syllable_ratio_stats,
)
from .timing import (
    PAUSE_SYMBOL,
    BendResult,
    DurationPlan,
    PhonemeTiming,
    PhonemeTrack,
    PlanEntry,
    apply_bend,
    assemble_track,
    bending_ratio,
    build_duration_plan,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentInfeasible",
    "AlignmentResult",
    "AttentionDocument",
    "AttentionMatrix",
    "BendResult",
    "CandidateExplosion",
    "CandidateLabeling",
    "DEFAULT_PAUSE_THRESHOLD_MS",
    "DimensionMismatch",
    "DubsyncError",
    "DurationPlan",
    "EmptyCorpus",
    "EmptyPhrase",
    "EmptyTranscript",
    "InconsistentTokenization",
    "NonPositiveRatio",
    "PAUSE_SYMBOL",
    "ParallelSegmentPair",
    "PhoDocument",
    "PhoSyntaxError",
    "PhonemeTiming",
    "PhonemeTrack",
    "PlanDegenerate",
    "PlanEntry",
    "ProsodicPhrase",
    "SchemaError",
    "SegmentTranscript",
    "SourceLabeledSentence",
    "StatsSummary",
    "TargetTokens",
    "TimedWord",
    "TimingError",
    "UnsupportedLanguage",
    "align_phrases",
    "apply_bend",
    "assemble_track",
    "bend_ratio_distribution",
    "bending_ratio",
    "build_duration_plan",
    "count_labelings",
    "count_syllables",
    "emit_attention",
    "emit_pho",
    "emit_segment",
    "enumerate_labelings",
    "label_source_tokens",
    "load_parallel_corpus",
    "parse_attention",
    "parse_pho",
    "parse_pho_document",
    "parse_segment",
    "pause_overlap_rate",
    "score_labeling",
    "segment_into_phrases",
    "split_pho_phrases",
    "syllable_ratio_stats",
]
