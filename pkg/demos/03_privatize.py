"""End-to-end privatization under a fixed document-level budget.

Builds a small random embedding vocabulary, then privatizes one review at
the three privacy levels and prints the budget ledger: every chunk's
epsilon share sums exactly to the document epsilon.

Run: python3 demos/03_privatize.py
"""

import numpy as np

from chunkdp import (
    ChunkLexicon,
    ContractionTable,
    EmbeddingStore,
    PRIVACY_LEVELS,
    PipelineResources,
    StopwordSet,
    compute_doc_epsilon,
    privatize_document,
    tokenize,
)

VOCAB = [
    "coffee", "sugar", "service", "staff", "hotel", "room", "breakfast",
    "great", "terrible", "friendly", "clean", "dirty", "london", "paris",
    "airport", "train", "market", "dinner", "cheap", "expensive", "quiet",
    "noisy", "small", "spacious", "helpful", "rude", "warm", "cold",
    "coffee_sugar", "friendly_staff",
]

TEXT = "The friendly staff served coffee sugar at breakfast. The room was clean but noisy."


def main():
    rng = np.random.default_rng(12)
    store = EmbeddingStore(
        tokens=list(VOCAB), matrix=rng.normal(size=(len(VOCAB), 16)) * 3.0
    )
    res = PipelineResources(
        stopwords=StopwordSet.default(),
        contractions=ContractionTable.default(),
        store=store,
        decomposition="pmi",
        distribution="uniform",
        invert=False,
        lexicon=ChunkLexicon({2: {"coffee sugar", "friendly staff"}}),
    )

    doc_len = len(tokenize(TEXT))
    print(f"original ({doc_len} tokens): {TEXT}\n")

    for level, base in PRIVACY_LEVELS.items():
        eps = compute_doc_epsilon(doc_len, base)
        record = privatize_document("demo", TEXT, res, eps, seed=42)
        print(f"level={level} (doc epsilon = {eps:.1f})")
        for key, share, mode in record.ledger:
            print(f"  {share:7.3f}  {mode:12s} {key}")
        spent = sum(share for _k, share, _m in record.ledger)
        print(f"  total spent = {spent:.3f}")
        print(f"  private: {record.private_text}\n")


if __name__ == "__main__":
    main()
