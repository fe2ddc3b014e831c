"""Subword-to-word score alignment.

Transformer tokenizers split words into pieces and add special tokens; the
score file needs exactly one score per `\\b\\w+\\b` word. Alignment goes
through character offsets: each model token's span is attributed to the
word(s) it overlaps, piece scores are summed per word, and zero-width
spans (special tokens) are dropped.
"""

from __future__ import annotations

from typing import Sequence

from .records import word_spans


def align_token_scores(
    text: str,
    token_scores: Sequence[float],
    offsets: Sequence[tuple[int, int]],
) -> list[tuple[str, float]]:
    """Sum model-token scores into per-word scores via character offsets.

    Words no model token covers (rare, e.g. tokenizer-stripped characters)
    keep a score of 0 so the output always aligns with the word sequence.
    """
    if len(token_scores) != len(offsets):
        raise ValueError(
            f"{len(token_scores)} scores for {len(offsets)} token offsets"
        )
    spans = word_spans(text)
    sums = [0.0] * len(spans)
    w = 0
    for score, (start, end) in zip(token_scores, offsets):
        if end <= start:  # special token
            continue
        # words and subword tokens are both emitted left to right, so a
        # single cursor suffices
        while w < len(spans) and spans[w][2] <= start:
            w += 1
        j = w
        while j < len(spans) and spans[j][1] < end:
            sums[j] += float(score)
            j += 1
    return [(word, sums[i]) for i, (word, _s, _e) in enumerate(spans)]
