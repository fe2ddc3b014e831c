"""Keyword-extraction scorers: embedding-similarity (KeyBERT-style) and
statistical (YAKE-style).

Both return a score for *all* unigrams (top-N with N = word count), one
entry per occurrence. The embedding scorer marks its records invert=true:
a high similarity means a strong keyword, which should receive *less*
budget. YAKE scores are already lower-is-more-important, so its records
stay uninverted.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from typing import Callable, Sequence

import numpy as np

from .records import DEFAULT_INVERT, ScoreRecord, tokenize

EmbedFn = Callable[[Sequence[str]], np.ndarray]


def sentence_transformer_embedder(model_name: str) -> EmbedFn:
    """Embedding function backed by a sentence-transformers model."""
    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(model_name)

    def embed(texts: Sequence[str]) -> np.ndarray:
        return np.asarray(model.encode(list(texts)))

    return embed


def keybert_scores(text: str, embed: EmbedFn, doc_id: str) -> ScoreRecord:
    """Document/word embedding cosine similarity as keyword strength.

    Every distinct word is a candidate; every occurrence carries its word's
    similarity to the whole document.
    """
    words = tokenize(text)
    if not words:
        return ScoreRecord(doc_id, "keybert", DEFAULT_INVERT["keybert"], [])
    candidates = sorted(set(words))
    vectors = np.asarray(embed([text] + candidates), dtype=np.float64)
    doc_vec, word_vecs = vectors[0], vectors[1:]
    norms = np.linalg.norm(word_vecs, axis=1) * np.linalg.norm(doc_vec)
    norms[norms == 0] = 1.0
    sims = word_vecs @ doc_vec / norms
    by_word = dict(zip(candidates, sims))
    return ScoreRecord(
        doc_id=doc_id,
        method="keybert",
        invert=DEFAULT_INVERT["keybert"],
        scores=[(w, float(by_word[w])) for w in words],
    )


_SENT_RE = re.compile(r"(?<=[.!?])\s+")
_WORD_CASED_RE = re.compile(r"\b\w+\b")


def yake_scores(text: str, doc_id: str, window: int = 1) -> ScoreRecord:
    """Statistical unigram keyword scores; lower means more keyword-like.

    Follows the standard single-word feature combination: casing, position
    (earlier sentences score better), frequency normalized by the corpus
    mean and standard deviation, relatedness to context (how promiscuously
    the word co-occurs), and sentence spread:

        S(w) = (rel * pos) / (case + freq/rel + spread/rel)
    """
    sentences = [s for s in _SENT_RE.split(text) if s.strip()]
    occurrences: list[tuple[str, str, int]] = []  # (lower, surface, sent index)
    sent_tokens: list[list[str]] = []
    for s_idx, sentence in enumerate(sentences):
        tokens = [m.group(0) for m in _WORD_CASED_RE.finditer(sentence)]
        sent_tokens.append([t.lower() for t in tokens])
        for surface in tokens:
            occurrences.append((surface.lower(), surface, s_idx))
    if not occurrences:
        return ScoreRecord(doc_id, "yake", DEFAULT_INVERT["yake"], [])

    tf = Counter(w for w, _s, _i in occurrences)
    counts = np.array(list(tf.values()), dtype=np.float64)
    mean_tf, std_tf = float(counts.mean()), float(counts.std())

    upper = Counter()
    sent_positions: dict[str, list[int]] = defaultdict(list)
    for word, surface, s_idx in occurrences:
        if surface[:1].isupper() or surface.isupper():
            upper[word] += 1
        sent_positions[word].append(s_idx)

    left: dict[str, set[str]] = defaultdict(set)
    right: dict[str, set[str]] = defaultdict(set)
    for tokens in sent_tokens:
        for i, word in enumerate(tokens):
            for j in range(max(0, i - window), i):
                left[word].add(tokens[j])
            for j in range(i + 1, min(len(tokens), i + window + 1)):
                right[word].add(tokens[j])

    n_sentences = len(sentences)
    max_tf = float(counts.max())
    score_by_word: dict[str, float] = {}
    for word, freq in tf.items():
        case = max(upper[word], 0) / (1.0 + math.log(freq))
        median_sent = float(np.median(sent_positions[word]))
        pos = math.log2(math.log2(2.0 + median_sent) + 1.0) + 1.0
        freq_norm = freq / (mean_tf + std_tf) if (mean_tf + std_tf) > 0 else 0.0
        rel = 1.0 + (len(left[word]) + len(right[word])) / max_tf * freq
        spread = len(set(sent_positions[word])) / n_sentences
        score_by_word[word] = (rel * pos) / (case + freq_norm / rel + spread / rel)

    return ScoreRecord(
        doc_id=doc_id,
        method="yake",
        invert=DEFAULT_INVERT["yake"],
        scores=[(w, float(score_by_word[w])) for w, _s, _i in occurrences],
    )
