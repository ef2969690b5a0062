"""Shared test utilities: an independent brute-force aligner and random
instance generators.

The brute-force oracle deliberately avoids the library's code paths: it
grows label sequences token by token, keeps the admissible ones, and
scores each by multiplying plain-Python masked row sums (no log space,
no masses precomputation).  Only the tie-break rule is shared, as the
contract requires: earliest-boundary candidate wins among scores within
1e-12 of each other.
"""

from __future__ import annotations

import math

import numpy as np

TIE_TOLERANCE = 1e-12


def brute_force_candidates(n_tokens, k_labels, word_group):
    """All admissible labelings, found by token-by-token extension."""
    found = []

    def extend(seq):
        pos = len(seq)
        if pos == n_tokens:
            if seq[-1] == k_labels:
                found.append(tuple(seq))
            return
        if word_group[pos] == word_group[pos - 1]:
            options = (seq[-1],)
        else:
            options = (seq[-1], seq[-1] + 1)
        for label in options:
            if label <= k_labels:
                extend(seq + [label])

    extend([1])
    return found


def direct_product_score(weights, source_labels, candidate):
    """Plain product over steps of the masked per-step row sum."""
    product = 1.0
    for n, label in enumerate(candidate):
        row_sum = 0.0
        for m, src_label in enumerate(source_labels):
            if src_label == label:
                row_sum += float(weights[n][m])
        product *= row_sum
    return product


def boundary_vector(candidate):
    return tuple(
        i for i in range(1, len(candidate)) if candidate[i] != candidate[i - 1]
    )


def brute_force_align(weights, source_labels, word_group):
    """Best labeling by exhaustive direct-product scoring.

    Candidates are ranked in earliest-boundary order; a later candidate
    must beat the incumbent's log score by more than the tie tolerance.
    """
    n_tokens = len(weights)
    k_labels = max(source_labels)
    candidates = sorted(
        brute_force_candidates(n_tokens, k_labels, word_group),
        key=boundary_vector,
    )
    best = None
    best_log = -math.inf
    for candidate in candidates:
        product = direct_product_score(weights, source_labels, candidate)
        log_score = math.log(product) if product > 0 else -math.inf
        if log_score > best_log + TIE_TOLERANCE:
            best_log = log_score
            best = candidate
    return best, len(candidates)


def random_instance(rng, max_n=8, max_m=8, max_k=4):
    """A random attention grid, source labeling, and target word grouping.

    Weights are bounded away from zero so the direct product never
    underflows against the implementation's mass floor.
    """
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))

    # Random target word grouping: consecutive ids starting at 1.
    groups = [1]
    for _ in range(n - 1):
        groups.append(groups[-1] + int(rng.integers(0, 2)))
    n_groups = groups[-1]

    k = int(rng.integers(1, min(max_k, n_groups, m) + 1))

    # Source labels: non-decreasing, step 1, covering 1..k over m tokens.
    cuts = sorted(rng.choice(np.arange(1, m), size=k - 1, replace=False)) if k > 1 else []
    source_labels = []
    label = 1
    for pos in range(m):
        if cuts and pos == cuts[0]:
            label += 1
            cuts = cuts[1:]
        source_labels.append(label)

    weights = rng.uniform(0.05, 1.0, size=(n, m))
    weights /= weights.sum(axis=1, keepdims=True)
    return weights, source_labels, groups, k


def random_phoneme_durations(rng, max_len=12):
    n = int(rng.integers(1, max_len + 1))
    return [int(d) for d in rng.integers(20, 400, size=n)]
