"""Word-importance scores and their conversion into per-word / per-chunk
privacy budgets.

The conversion pipeline is: zero stopword positions, shift negatives by the
absolute minimum of the nonzero scores, optionally invert, normalize the
nonzero scores to sum 1 and scale by the document epsilon. One deliberate
quirk is preserved: a negative score that shifts to exactly 0 is treated
like a stopword from then on and receives no budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .decomposition import Chunk
from .ngrams import NgramTable
from .textprep import StopwordSet


class BudgetError(ValueError):
    pass


class AlignmentError(BudgetError):
    """A score sequence does not line up with the document's tokens."""


class ScoreLookupError(KeyError):
    pass


@dataclass
class BudgetAllocation:
    word_budgets: list[tuple[str, float]]
    total: float

    @property
    def budgets(self) -> list[float]:
        return [b for _, b in self.word_budgets]


def uniform_scores(tokens: Sequence[str]) -> list[tuple[str, float]]:
    """Every token scores 1.0; stopwords get zeroed later by convert_scores."""
    return [(t, 1.0) for t in tokens]


def ic_table_scores(
    tokens: Sequence[str], ic_table: Mapping[str, float]
) -> list[tuple[str, float]]:
    """Lookup against a precomputed word -> information-content table.

    Words absent from the table fall back to a score of 1.0.
    """
    return [(t, ic_table.get(t, 1.0)) for t in tokens]


def corpus_ic_scores(
    tokens: Sequence[str], unigram_table: NgramTable
) -> list[tuple[str, float]]:
    """Corpus-derived information content: -log2(c(w)/N); unseen words -> 1.0."""
    big_n = unigram_table.total_unigrams
    out = []
    for t in tokens:
        c = unigram_table.frequency(t)
        score = -math.log2(c / big_n) if c > 0 and big_n > 0 else 1.0
        out.append((t, score))
    return out


def load_ic_table(path) -> dict[str, float]:
    """TSV of "word<TAB>ic_value" rows."""
    table: dict[str, float] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise BudgetError(f"{path}:{lineno}: expected 'word\\tic_value'")
            try:
                table[fields[0]] = float(fields[1])
            except ValueError:
                raise BudgetError(
                    f"{path}:{lineno}: non-numeric value {fields[1]!r}"
                ) from None
    return table


@dataclass
class ScoreFile:
    """Pre-indexed external score records, one JSON line per document.

    Record shape: {"doc_id": ..., "invert": ..., "scores": [[word, score], ...]}
    with words in tokenizer order.
    """

    records: dict[str, dict] = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "ScoreFile":
        records: dict[str, dict] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as e:
                    raise BudgetError(f"{path}:{lineno}: bad JSON ({e})") from None
                for key in ("doc_id", "invert", "scores"):
                    if key not in rec:
                        raise BudgetError(f"{path}:{lineno}: missing {key!r}")
                records[str(rec["doc_id"])] = rec
        return cls(records)

    def get(self, doc_id: str) -> dict:
        if doc_id not in self.records:
            raise ScoreLookupError(f"no score record for doc_id {doc_id!r}")
        return self.records[doc_id]


def external_scores(
    doc_id: str, score_file: ScoreFile, tokens: Sequence[str] | None = None
) -> list[tuple[str, float]]:
    """Ordered (word, score) list recorded for the document.

    When tokens are given, the recorded word sequence must match them
    exactly; this is the alignment validator used against externally
    produced score files.
    """
    rec = score_file.get(doc_id)
    scores = [(str(w), float(s)) for w, s in rec["scores"]]
    if tokens is not None:
        recorded = [w for w, _ in scores]
        if recorded != list(tokens):
            raise AlignmentError(
                f"doc {doc_id!r}: recorded words do not match document tokens "
                f"({len(recorded)} vs {len(tokens)})"
            )
    return scores


def validate_score_record(rec: dict, tokens: Sequence[str]) -> None:
    """Raise AlignmentError unless the record's word sequence equals tokens."""
    recorded = [str(w) for w, _ in rec["scores"]]
    if recorded != list(tokens):
        raise AlignmentError(
            f"doc {rec.get('doc_id')!r}: recorded words do not match tokens"
        )


def convert_scores(
    scores: Sequence[float],
    tokens: Sequence[str],
    epsilon: float,
    invert: bool,
    stopwords: StopwordSet,
) -> BudgetAllocation:
    """Turn raw word scores into per-word epsilon shares summing to epsilon.

    All-zero score vectors (e.g. all-stopword documents) yield an all-zero
    allocation; callers decide how to surface that.
    """
    if epsilon <= 0:
        raise BudgetError(f"epsilon must be > 0, got {epsilon}")
    if len(scores) != len(tokens):
        raise AlignmentError(
            f"scores/tokens length mismatch: {len(scores)} vs {len(tokens)}"
        )
    vals = [0.0 if t in stopwords else float(s) for t, s in zip(tokens, scores)]

    if any(v < 0 for v in vals):
        shift = abs(min(v for v in vals if v != 0))
        vals = [v + shift if v != 0 else 0.0 for v in vals]

    budgets = [0.0] * len(vals)
    if invert:
        nonzero = [v for v in vals if v > 0]
        if nonzero:
            lo, hi = min(nonzero), max(nonzero)
            if hi == lo:
                inverted = {i: 1.0 for i, v in enumerate(vals) if v > 0}
            else:
                inverted = {i: (hi + lo) - v for i, v in enumerate(vals) if v > 0}
            total = sum(inverted.values())
            for i, v in inverted.items():
                budgets[i] = v / total * epsilon
    else:
        total = sum(vals)
        if total > 0:
            budgets = [v / total * epsilon for v in vals]
    return BudgetAllocation(
        word_budgets=list(zip(tokens, budgets)), total=epsilon
    )


def chunk_budgets(
    allocation: BudgetAllocation, chunks: Sequence[Chunk]
) -> list[tuple[str, float]]:
    """Sum word budgets per chunk, consuming them strictly in order."""
    n_words = sum(len(c) for c in chunks)
    if n_words != len(allocation.word_budgets):
        raise AlignmentError(
            f"chunks cover {n_words} tokens but allocation has "
            f"{len(allocation.word_budgets)}"
        )
    out: list[tuple[str, float]] = []
    pos = 0
    for chunk in chunks:
        eps = sum(b for _, b in allocation.word_budgets[pos : pos + len(chunk)])
        pos += len(chunk)
        out.append((chunk.key, eps))
    return out
