"""Transferring phrase labels onto a translation via attention weights.

The translated token sequence must be split into the same number of
phrases as the source, in the same order, without splitting a word's
subword pieces.  Every admissible labeling is scored against the
attention matrix; the winner keeps translated tokens together with the
source tokens they attend to.
"""

import math

import numpy as np

from dubsync import (
    AttentionMatrix,
    ProsodicPhrase,
    SourceLabeledSentence,
    TargetTokens,
    align_phrases,
    enumerate_labelings,
    score_labeling,
)

# Source: "keep going | now" -- two phrases, labels [1, 1, 2].
source = SourceLabeledSentence(
    tokens=("keep", "going", "now"),
    labels=(1, 1, 2),
    phrases=(
        ProsodicPhrase(1, (0, 2), 0.0, 1.0, trailing_pause_s=0.3),
        ProsodicPhrase(2, (2, 3), 1.3, 1.8, trailing_pause_s=0.0),
    ),
)

# Target: four tokens; "ade@@" and "@@lante" are pieces of one word, so
# they share word group 2 and can never straddle a phrase boundary.
target = TargetTokens(
    tokens=("sigue", "ade@@", "@@lante", "ahora"),
    word_group=(1, 2, 2, 3),
)

# Decoder attention, one row per target step (rows sum to 1).
matrix = AttentionMatrix(
    np.array(
        [
            [0.80, 0.15, 0.05],
            [0.20, 0.70, 0.10],
            [0.15, 0.75, 0.10],
            [0.05, 0.05, 0.90],
        ]
    )
)

print("admissible labelings and their scores:")
for labels in enumerate_labelings(4, 2, target.word_group):
    log_score = score_labeling(matrix, source.labels, labels)
    print(f"  {list(labels)}  product = {math.exp(log_score):.5f}")

result = align_phrases(matrix, source, target)
print(f"\nbest labeling: {list(result.best.labels)}")
print(f"candidates considered: {result.candidate_count}")

for label in (1, 2):
    tokens = [t for t, l in zip(target.tokens, result.best.labels) if l == label]
    print(f"  target phrase {label}: {' '.join(tokens)}")

# The subword constraint at work: tokens 2 and 3 always share a label.
assert all(
    labels[1] == labels[2] for labels in enumerate_labelings(4, 2, target.word_group)
)
