"""Translation backends that expose per-step attention over source pieces.

Two implementations:

* :class:`LexiconBackend`: a self-contained word-lexicon translator
  with a trained subword vocabulary and a distance-kernel attention
  surrogate.  Deterministic, dependency-free, good for tests and for
  exercising downstream consumers.
* :class:`TransformersBackend`: wraps a seq2seq model from the
  ``transformers`` toolkit and averages its decoder cross-attention
  heads (optionally layers).  The reserved model id ``random-byt5``
  builds a tiny randomly initialized byte-level model so the whole path
  can run without downloading weights.

Both return rows that sum to 1 over the exported source pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelLoadError, TokenizationError
from .subwords import normalize, tokenize, train_vocab

#: Built-in English -> Spanish word lexicon for the offline backend.
EN_ES = {
    "a": "una",
    "and": "y",
    "are": "estás",
    "doing": "haciendo",
    "going": "adelante",
    "here": "aquí",
    "he": "él",
    "hello": "hola",
    "is": "es",
    "keep": "sigue",
    "keeps": "guarda",
    "me": "me",
    "moment": "momento",
    "now": "ahora mismo",
    "on": "en",
    "please": "por favor",
    "stop": "para",
    "thank": "gracias",
    "that": "eso",
    "the": "el",
    "this": "esto",
    "to": "a",
    "wait": "espera",
    "we": "nosotros",
    "what": "qué",
    "where": "dónde",
    "why": "por qué",
    "you": "tú",
}


@dataclass(frozen=True)
class TranslationResult:
    """One sentence's translation with alignment information.

    ``src_pieces`` pair subword text with a 0-based source word index;
    ``tgt_pieces`` pair subword text with a 1-based target word group.
    ``rows[n, m]`` is the attention of target piece ``n`` on source
    piece ``m``; every row sums to 1.
    """

    source_sentence: str
    translation: str
    src_pieces: tuple[tuple[str, int], ...]
    tgt_pieces: tuple[tuple[str, int], ...]
    rows: np.ndarray
    meta: dict


class LexiconBackend:
    """Deterministic translator: word lexicon + distance-kernel attention."""

    #: How fast attention decays with source-word distance from the
    #: aligned word.
    DECAY = 2.0

    def __init__(self, lexicon: dict[str, str] | None = None, n_merges: int = 200):
        self.lexicon = EN_ES if lexicon is None else lexicon
        self.n_merges = n_merges

    def _translate_words(self, words: list[str]) -> list[tuple[str, int]]:
        """Target words, each tagged with its originating source index."""
        out = []
        for index, word in enumerate(words):
            translated = self.lexicon.get(word.lower(), word)
            for target_word in translated.split():
                out.append((target_word, index))
        return out

    def translate_batch(self, sentences: list[str]) -> list[TranslationResult]:
        normalized = [normalize(s) for s in sentences]
        translated = [self._translate_words(s.split()) for s in normalized]
        # One joint vocabulary over both languages.
        vocab = train_vocab(
            normalized + [" ".join(w for w, _ in t) for t in translated],
            n_merges=self.n_merges,
        )

        results = []
        for sentence, target_words in zip(normalized, translated):
            src_pieces = tuple(tokenize(vocab, sentence))
            tgt_pieces = []
            origins = []
            for group, (word, origin) in enumerate(target_words, start=1):
                for piece in vocab.encode_word(word):
                    tgt_pieces.append((piece, group))
                    origins.append(origin)

            src_words = np.array([w for _, w in src_pieces], dtype=np.float64)
            rows = np.empty((len(tgt_pieces), len(src_pieces)))
            for n, origin in enumerate(origins):
                rows[n] = np.exp(-self.DECAY * np.abs(src_words - origin))
            rows /= rows.sum(axis=1, keepdims=True)

            results.append(
                TranslationResult(
                    source_sentence=sentence,
                    translation=" ".join(w for w, _ in target_words),
                    src_pieces=src_pieces,
                    tgt_pieces=tuple(tgt_pieces),
                    rows=rows,
                    meta={"model": "lexicon", "vocab_merges": vocab.size},
                )
            )
        return results


class TransformersBackend:
    """Seq2seq model from the ``transformers`` toolkit.

    Cross-attention is averaged over the heads of the last decoder layer
    (``attn_layers="last"``) or over all layers (``"mean"``).  The model
    id ``random-byt5`` constructs a tiny randomly initialized byte-level
    model with a fixed seed instead of loading pretrained weights.
    """

    RANDOM_MODEL_ID = "random-byt5"

    def __init__(
        self,
        model_id: str,
        attn_layers: str = "last",
        max_new_tokens: int = 48,
        seed: int = 0,
    ):
        if attn_layers not in ("last", "mean"):
            raise ValueError("attn_layers must be 'last' or 'mean'")
        self.model_id = model_id
        self.attn_layers = attn_layers
        self.max_new_tokens = max_new_tokens
        self.seed = seed
        self._load()

    def _load(self) -> None:
        try:
            import torch
            from transformers import (
                AutoModelForSeq2SeqLM,
                AutoTokenizer,
                ByT5Tokenizer,
                T5Config,
                T5ForConditionalGeneration,
            )
        except ImportError as exc:
            raise ModelLoadError(
                f"transformers backend needs torch + transformers: {exc}"
            ) from exc

        self._torch = torch
        if self.model_id == self.RANDOM_MODEL_ID:
            self.tokenizer = ByT5Tokenizer()
            torch.manual_seed(self.seed)
            config = T5Config(
                vocab_size=384,
                d_model=64,
                d_kv=16,
                d_ff=128,
                num_layers=2,
                num_heads=4,
                decoder_start_token_id=0,
            )
            self.model = T5ForConditionalGeneration(config)
            self._byte_level = True
        else:
            try:
                self.tokenizer = AutoTokenizer.from_pretrained(self.model_id)
                self.model = AutoModelForSeq2SeqLM.from_pretrained(self.model_id)
            except Exception as exc:
                raise ModelLoadError(
                    f"could not load model {self.model_id!r}: {exc}"
                ) from exc
            self._byte_level = False
        self.model.eval()

    # -- piece/word bookkeeping ------------------------------------------

    def _source_pieces(self, sentence: str, ids: list[int]) -> list[tuple[str, int]]:
        """Non-special source tokens paired with 0-based word indices.

        Byte-level: a space byte closes a word and attaches to it.
        Sentencepiece-style: a leading word-start marker opens a word.
        """
        tokens = self.tokenizer.convert_ids_to_tokens(ids)
        specials = set(self.tokenizer.all_special_ids)
        pieces = []
        word = 0
        for token_id, token in zip(ids, tokens):
            if token_id in specials:
                continue
            if self._byte_level:
                pieces.append((token, word))
                if token == " ":
                    word += 1
            else:
                if token.startswith("▁") and pieces:
                    word += 1
                pieces.append((token, word))
        return pieces

    def _target_groups(self, tokens: list[str]) -> list[int]:
        """1-based word groups for generated tokens."""
        groups = []
        group = 1
        after_space = False
        for token in tokens:
            if self._byte_level:
                if after_space:
                    group += 1
                groups.append(group)
                after_space = token == " "
            else:
                if token.startswith("▁") and groups:
                    group += 1
                groups.append(group)
        return groups

    # -- translation -------------------------------------------------------

    def _translate_one(self, sentence: str) -> TranslationResult:
        torch = self._torch
        sentence = normalize(sentence)
        if not sentence:
            raise TokenizationError("sentence is empty")
        if self._byte_level and not sentence.isascii():
            raise TokenizationError(
                "the byte-level test model only supports ASCII sentences"
            )

        encoded = self.tokenizer(sentence, return_tensors="pt")
        input_ids = encoded.input_ids
        src_pieces = self._source_pieces(sentence, input_ids[0].tolist())
        if not src_pieces:
            raise TokenizationError(f"no source pieces for {sentence!r}")
        src_keep = [
            i
            for i, token_id in enumerate(input_ids[0].tolist())
            if token_id not in set(self.tokenizer.all_special_ids)
        ]

        generate_kwargs = dict(
            max_new_tokens=self.max_new_tokens,
            num_beams=1,
            do_sample=False,
            output_attentions=True,
            return_dict_in_generate=True,
        )
        if self.model_id == self.RANDOM_MODEL_ID:
            # An untrained model would emit nothing but pad/eos.
            generate_kwargs["suppress_tokens"] = [
                self.tokenizer.pad_token_id,
                self.tokenizer.eos_token_id,
            ]
            generate_kwargs["min_new_tokens"] = 4
        with torch.no_grad():
            out = self.model.generate(input_ids, **generate_kwargs)

        generated = out.sequences[0].tolist()[1:]  # drop decoder start
        specials = set(self.tokenizer.all_special_ids)
        keep_steps = [i for i, t in enumerate(generated) if t not in specials]
        if not keep_steps:
            raise TokenizationError(f"model produced no visible tokens for {sentence!r}")
        tgt_tokens = self.tokenizer.convert_ids_to_tokens(
            [generated[i] for i in keep_steps]
        )
        tgt_groups = self._target_groups(tgt_tokens)

        # cross_attentions: per step -> per layer -> [batch, heads, 1, src].
        step_rows = []
        for step in keep_steps:
            layers = out.cross_attentions[step]
            if self.attn_layers == "last":
                stacked = layers[-1]
            else:
                stacked = torch.stack(layers).mean(dim=0)
            step_rows.append(stacked[0, :, 0, :].mean(dim=0).numpy())
        rows = np.asarray(step_rows, dtype=np.float64)[:, src_keep]

        # Dropping special source columns loses their mass; renormalize.
        sums = rows.sum(axis=1, keepdims=True)
        uniform = np.full(rows.shape[1], 1.0 / rows.shape[1])
        rows = np.where(sums > 0, rows / np.where(sums == 0, 1.0, sums), uniform)

        translation = self.tokenizer.decode(
            [generated[i] for i in keep_steps], skip_special_tokens=True
        )
        return TranslationResult(
            source_sentence=sentence,
            translation=translation,
            src_pieces=tuple(src_pieces),
            tgt_pieces=tuple(zip(tgt_tokens, tgt_groups)),
            rows=rows,
            meta={
                "model": self.model_id,
                "attn_layers": self.attn_layers,
                "heads": "mean",
            },
        )

    def translate_batch(self, sentences: list[str]) -> list[TranslationResult]:
        return [self._translate_one(s) for s in sentences]


def load_backend(model_id: str, **kwargs):
    """Backend factory used by the CLI: ``lexicon`` or a transformers id."""
    if model_id == "lexicon":
        return LexiconBackend()
    if model_id.startswith("lexicon:"):
        raise ModelLoadError(
            f"unknown lexicon variant {model_id!r}; only 'lexicon' is built in"
        )
    return TransformersBackend(model_id, **kwargs)
