"""A small byte-pair-style subword vocabulary with exact word-boundary
bookkeeping.

Words are split into pieces by greedily applying learned merges; the
first piece of each word carries the "▁" word-start marker, so a
piece sequence detokenizes back to the exact (whitespace-normalized)
sentence.  Merges are learned from a training corpus; ties break
lexicographically so training is deterministic.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import TokenizationError

WORD_START = "▁"


def normalize(sentence: str) -> str:
    """Collapse runs of whitespace; tokenization operates on this form."""
    return " ".join(sentence.split())


@dataclass(frozen=True)
class SubwordVocab:
    """An ordered list of merges; applying them in order encodes a word."""

    merges: tuple[tuple[str, str], ...]

    @property
    def size(self) -> int:
        return len(self.merges)

    def encode_word(self, word: str) -> list[str]:
        pieces = [WORD_START + word[0]] + list(word[1:])
        for left, right in self.merges:
            merged: list[str] = []
            i = 0
            while i < len(pieces):
                if (
                    i + 1 < len(pieces)
                    and pieces[i] == left
                    and pieces[i + 1] == right
                ):
                    merged.append(left + right)
                    i += 2
                else:
                    merged.append(pieces[i])
                    i += 1
            pieces = merged
        return pieces


def train_vocab(sentences: Iterable[str], n_merges: int = 200) -> SubwordVocab:
    """Learn merges from the corpus, most frequent adjacent pair first."""
    word_freq = Counter()
    for sentence in sentences:
        word_freq.update(normalize(sentence).split())

    split_words = {
        word: [WORD_START + word[0]] + list(word[1:]) for word in word_freq
    }
    merges: list[tuple[str, str]] = []
    for _ in range(n_merges):
        pair_freq = Counter()
        for word, pieces in split_words.items():
            freq = word_freq[word]
            for a, b in zip(pieces, pieces[1:]):
                pair_freq[(a, b)] += freq
        if not pair_freq:
            break
        best_count = max(pair_freq.values())
        if best_count < 2:
            break
        best = min(pair for pair, c in pair_freq.items() if c == best_count)
        merges.append(best)
        left, right = best
        for word, pieces in split_words.items():
            merged: list[str] = []
            i = 0
            while i < len(pieces):
                if i + 1 < len(pieces) and pieces[i] == left and pieces[i + 1] == right:
                    merged.append(left + right)
                    i += 2
                else:
                    merged.append(pieces[i])
                    i += 1
            split_words[word] = merged
    return SubwordVocab(tuple(merges))


def tokenize(vocab: SubwordVocab, sentence: str) -> list[tuple[str, int]]:
    """Encode a sentence into (piece, 0-based word index) pairs."""
    words = normalize(sentence).split()
    if not words:
        raise TokenizationError("sentence is empty")
    out: list[tuple[str, int]] = []
    for index, word in enumerate(words):
        out.extend((piece, index) for piece in vocab.encode_word(word))
    return out


def detokenize(pieces: Sequence[str]) -> str:
    """Invert tokenization: concatenate and turn word-start markers back
    into spaces."""
    return "".join(pieces).replace(WORD_START, " ").strip()
