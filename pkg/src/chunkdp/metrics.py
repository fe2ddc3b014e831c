"""Desk-scale privacy/utility metrics: identifier retention, mean-pooled
cosine similarity, chunk-level token retention, and the relative-gain
trade-off score.
"""

from __future__ import annotations

import numpy as np

from .mechanism import EmbeddingStore
from .textprep import tokenize


class MetricUndefinedError(ValueError):
    """The metric has no defined value for this document (excluded upstream)."""


def pi_retention(identifiers: list[str], private_text: str) -> float:
    """Fraction of identifier strings surviving verbatim in the private text.

    Matching is case-insensitive on tokenized forms: an identifier survives
    when its token sequence appears contiguously in the output tokens.
    """
    if not identifiers:
        raise MetricUndefinedError("no identifiers for this document")
    haystack = tokenize(private_text)
    hits = 0
    for ident in identifiers:
        needle = tokenize(ident)
        if needle and _contains_run(haystack, needle):
            hits += 1
    return hits / len(identifiers)


def _contains_run(haystack: list[str], needle: list[str]) -> bool:
    k = len(needle)
    return any(haystack[i : i + k] == needle for i in range(len(haystack) - k + 1))


def mean_pool(store: EmbeddingStore, tokens: list[str]) -> np.ndarray:
    """Mean of the embedding rows of the in-vocabulary tokens."""
    rows = [store.vector(t) for t in tokens if t in store]
    if not rows:
        raise MetricUndefinedError("no in-vocabulary tokens to pool")
    return np.mean(rows, axis=0)


def doc_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise MetricUndefinedError("zero vector in cosine similarity")
    return float(np.dot(a, b) / (na * nb))


def chunk_retention(ledger: list[tuple[str, str]]) -> float:
    """Fraction of (original, replacement) pairs that came through unchanged."""
    if not ledger:
        raise MetricUndefinedError("empty ledger")
    return sum(orig == repl for orig, repl in ledger) / len(ledger)


def relative_gain(
    u_private: list[float],
    u_original: list[float],
    p_private: list[float],
    p_original: list[float],
) -> float:
    """mean(U_p)/mean(U_o) - mean(P_p)/mean(P_o).

    Positive values mean the privacy gained outweighs the utility lost.
    """
    for name, vals in (
        ("u_private", u_private),
        ("u_original", u_original),
        ("p_private", p_private),
        ("p_original", p_original),
    ):
        if not vals:
            raise MetricUndefinedError(f"{name} is empty")
    u_o = float(np.mean(u_original))
    p_o = float(np.mean(p_original))
    if u_o == 0 or p_o == 0:
        raise MetricUndefinedError("zero denominator in relative gain")
    return float(np.mean(u_private)) / u_o - float(np.mean(p_private)) / p_o


# Fixed column order of the results TSV written by the experiment runner.
RESULTS_COLUMNS = (
    "dataset",
    "level",
    "decomposition",
    "distribution",
    "doc_epsilon",
    "n_docs",
    "chunk_retention",
    "cosine_similarity",
    "pi_retention",
    "relative_gain",
    "n_pass_through",
    "n_per_word_fallback",
    "n_all_stopword_docs",
)
