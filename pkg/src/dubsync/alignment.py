"""Attention-guided transfer of phrase labels onto translated tokens.

Admissible target labelings are monotonic: they start at phrase 1, step
by at most one, end at phrase K, and never split the subword pieces of
one word across phrases.  Each candidate is scored against the decoder
attention matrix: for every target step the attention mass landing on
source tokens that carry the candidate's label is summed, and the
per-step sums are multiplied.  The product is accumulated in log space
with a small per-step floor so a single empty step (e.g. punctuation
attending nowhere relevant) cannot annihilate an otherwise good
candidate.  The best-scoring labeling wins; exact ties go to the
candidate with the earliest boundaries.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AlignmentInfeasible, CandidateExplosion, DimensionMismatch
from .prosody import SourceLabeledSentence

#: Per-step floor applied to masked attention mass before taking the log.
DEFAULT_EPSILON = 1e-12

#: Refuse to materialize more candidate labelings than this.
DEFAULT_MAX_CANDIDATES = 2_000_000

#: Log-scores closer than this are considered tied.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class AttentionMatrix:
    """Dense non-negative attention weights, target steps x source tokens.

    ``weights[n, m]`` is the mass target step ``n`` puts on source token
    ``m``.  ``zero_sum_rows`` records rows that could not be normalized.
    """

    weights: np.ndarray
    zero_sum_rows: tuple[int, ...] = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError(f"attention matrix must be 2-d, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("attention weights must be finite")
        if np.any(w < 0):
            raise ValueError("attention weights must be non-negative")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_target(self) -> int:
        return self.weights.shape[0]

    @property
    def n_source(self) -> int:
        return self.weights.shape[1]

    def normalized(self) -> "AttentionMatrix":
        """Rescale each row to sum to 1.  Zero-mass rows are left as-is
        and flagged in ``zero_sum_rows``."""
        sums = self.weights.sum(axis=1)
        zero = sums == 0.0
        safe = np.where(zero, 1.0, sums)
        return AttentionMatrix(
            self.weights / safe[:, None],
            zero_sum_rows=tuple(int(i) for i in np.flatnonzero(zero)),
        )

    def scaled(self, factor: float) -> "AttentionMatrix":
        if factor <= 0:
            raise ValueError("scale factor must be > 0")
        return AttentionMatrix(self.weights * factor, self.zero_sum_rows)


@dataclass(frozen=True)
class TargetTokens:
    """Translated tokens plus the 1-based word each token belongs to.

    ``word_group`` starts at 1 and steps by 0 or 1, so subword pieces of
    one word form a contiguous run sharing a group id.
    """

    tokens: tuple[str, ...]
    word_group: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "word_group", tuple(self.word_group))
        if len(self.tokens) != len(self.word_group):
            raise ValueError("tokens and word_group must have equal length")
        if not self.tokens:
            raise ValueError("target must have at least one token")
        if self.word_group[0] != 1:
            raise ValueError("word_group must start at 1")
        for a, b in zip(self.word_group, self.word_group[1:]):
            if b - a not in (0, 1):
                raise ValueError("word_group must step by 0 or 1")

    @property
    def n_groups(self) -> int:
        return self.word_group[-1]


@dataclass(frozen=True)
class CandidateLabeling:
    """One admissible target labeling and its log score."""

    labels: tuple[int, ...]
    log_score: float

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels or self.labels[0] != 1:
            raise ValueError("labels must start at 1")
        for a, b in zip(self.labels, self.labels[1:]):
            if b - a not in (0, 1):
                raise ValueError("labels must step by 0 or 1")

    @property
    def n_phrases(self) -> int:
        return self.labels[-1]

    def boundaries(self) -> tuple[int, ...]:
        """Token positions where a new phrase begins (earliest-boundary
        vectors compare lexicographically smaller)."""
        return tuple(
            i for i in range(1, len(self.labels)) if self.labels[i] != self.labels[i - 1]
        )


@dataclass(frozen=True)
class AlignmentResult:
    """Winning labeling plus the size of the admissible set."""

    best: CandidateLabeling
    candidate_count: int
    all_scores: tuple[float, ...] | None = None


def _validate_word_group(n_tokens: int, word_group: Sequence[int]) -> tuple[int, ...]:
    group = tuple(word_group)
    if len(group) != n_tokens:
        raise DimensionMismatch(
            f"word_group has {len(group)} entries for {n_tokens} tokens"
        )
    if group[0] != 1:
        raise ValueError("word_group must start at 1")
    for a, b in zip(group, group[1:]):
        if b - a not in (0, 1):
            raise ValueError("word_group must step by 0 or 1")
    return group


def count_labelings(n_groups: int, k_labels: int) -> int:
    """Size of the admissible set: one of C(G-1, K-1) boundary placements."""
    if k_labels > n_groups:
        return 0
    return math.comb(n_groups - 1, k_labels - 1)


def enumerate_labelings(
    n_tokens: int,
    k_labels: int,
    word_group: Sequence[int] | None = None,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> list[tuple[int, ...]]:
    """List every admissible label sequence for ``n_tokens`` target tokens.

    Enumeration places the K-1 phrase boundaries in the gaps between
    consecutive word groups, which enforces the shared-label constraint
    for subword pieces by construction.  With every token its own word
    this yields exactly C(n_tokens - 1, k_labels - 1) sequences, ordered
    by boundary position (earliest boundaries first).
    """
    if n_tokens < 1:
        raise ValueError("n_tokens must be >= 1")
    if k_labels < 1:
        raise ValueError("k_labels must be >= 1")
    if word_group is None:
        group = tuple(range(1, n_tokens + 1))
    else:
        group = _validate_word_group(n_tokens, word_group)

    n_groups = group[-1]
    if k_labels > n_groups:
        raise AlignmentInfeasible(
            f"cannot fit {k_labels} phrase labels on {n_groups} word groups"
        )
    total = count_labelings(n_groups, k_labels)
    if total > max_candidates:
        raise CandidateExplosion(
            f"{total} candidate labelings exceed the cap of {max_candidates}; "
            "split the segment"
        )

    sequences: list[tuple[int, ...]] = []
    # A cut at gap position c puts groups > c into the next phrase.
    for cuts in itertools.combinations(range(1, n_groups), k_labels - 1):
        labels = tuple(1 + bisect_left(cuts, g) for g in group)
        sequences.append(labels)
    return sequences


def _masked_row_mass(
    weights: np.ndarray, source_labels: Sequence[int], k_labels: int
) -> np.ndarray:
    """``mass[n, l-1]`` = attention of target step ``n`` on source tokens
    labeled ``l``."""
    src = np.asarray(source_labels, dtype=np.int64)
    mass = np.empty((weights.shape[0], k_labels), dtype=np.float64)
    for label in range(1, k_labels + 1):
        mass[:, label - 1] = weights[:, src == label].sum(axis=1)
    return mass


def score_labeling(
    attention: AttentionMatrix | np.ndarray,
    source_labels: Sequence[int],
    candidate: Sequence[int],
    epsilon: float = DEFAULT_EPSILON,
) -> float:
    """Log score of one candidate labeling.

    Returns ``sum_n log(max(epsilon, mass_n))`` where ``mass_n`` is the
    attention of target step ``n`` summed over source tokens whose label
    equals ``candidate[n]``.  ``exp`` of the result equals the plain
    product of the masked per-step sums whenever no sum falls below
    ``epsilon``.
    """
    if isinstance(attention, AttentionMatrix):
        weights = attention.weights
    else:
        weights = np.asarray(attention, dtype=np.float64)
    n, m = weights.shape
    if len(source_labels) != m:
        raise DimensionMismatch(
            f"{len(source_labels)} source labels for {m} matrix columns"
        )
    cand = np.asarray(candidate, dtype=np.int64)
    if cand.shape[0] != n:
        raise DimensionMismatch(f"{cand.shape[0]} candidate labels for {n} matrix rows")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")

    k = int(max(source_labels))
    if cand.min() < 1 or cand.max() > k:
        raise ValueError(
            f"candidate labels must lie in 1..{k}, got "
            f"[{int(cand.min())}, {int(cand.max())}]"
        )
    mass = _masked_row_mass(weights, source_labels, k)
    picked = mass[np.arange(n), cand - 1]
    return float(np.log(np.maximum(picked, epsilon)).sum())


def align_phrases(
    attention: AttentionMatrix,
    source: SourceLabeledSentence,
    target: TargetTokens,
    epsilon: float = DEFAULT_EPSILON,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    keep_scores: bool = False,
) -> AlignmentResult:
    """Pick the admissible target labeling with the highest score.

    Candidates are scored in earliest-boundary-first order and a new
    winner must beat the incumbent by more than ``TIE_TOLERANCE``, so
    ties resolve deterministically to the earliest boundary vector.
    """
    n, m = attention.n_target, attention.n_source
    if len(target.tokens) != n:
        raise DimensionMismatch(
            f"attention has {n} rows but target has {len(target.tokens)} tokens"
        )
    if len(source.tokens) != m:
        raise DimensionMismatch(
            f"attention has {m} columns but source has {len(source.tokens)} tokens"
        )
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")

    k = source.n_phrases
    candidates = enumerate_labelings(n, k, target.word_group, max_candidates)

    mass = _masked_row_mass(attention.weights, source.labels, k)
    log_mass = np.log(np.maximum(mass, epsilon))
    rows = np.arange(n)

    best_labels: tuple[int, ...] | None = None
    best_score = -math.inf
    scores: list[float] = []
    for labels in candidates:
        score = float(log_mass[rows, np.asarray(labels) - 1].sum())
        if keep_scores:
            scores.append(score)
        if score > best_score + TIE_TOLERANCE:
            best_score = score
            best_labels = labels

    assert best_labels is not None  # candidates is never empty here
    return AlignmentResult(
        best=CandidateLabeling(best_labels, best_score),
        candidate_count=len(candidates),
        all_scores=tuple(scores) if keep_scores else None,
    )
