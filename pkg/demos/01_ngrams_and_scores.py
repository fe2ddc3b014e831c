"""From raw text to a chunking lexicon.

Counts n-grams over a tiny in-memory corpus, scores the bigrams with all
three association measures, and shows how the filters decide what becomes
a chunkable unit.

Run: python3 demos/01_ngrams_and_scores.py
"""

from chunkdp import (
    extract_ngrams,
    filter_pmi,
    filter_top_percent,
    score_all,
)

CORPUS = [
    "We visited New York City last summer. The credit card bill arrived late.",
    "New York City is loud. A credit card is convenient but dangerous.",
    "The bill arrived on time. We paid the credit card bill in New York.",
    "Last summer was hot in New York City.",
    "She lost her credit card near the city hall.",
] * 20  # repeat so counts clear the (tiny) thresholds used below


def main():
    tables = {t.n: t for t in extract_ngrams(CORPUS, n_max=4, min_count=2)}
    print(f"unigram total N = {tables[1].total_unigrams}")
    print(f"distinct bigrams = {len(tables[2].counts)}\n")

    for measure in ("pmi", "llr", "tscore"):
        scores = score_all(measure, 2, tables)
        top = sorted(scores.items(), key=lambda kv: -kv[1])[:5]
        print(f"top bigrams by {measure}:")
        for ngram, score in top:
            print(f"  {score:10.3f}  {ngram}")
        print()

    # PMI keeps frequent-and-associated entries; LLR/t-score keep a top slice.
    pmi_scores = score_all("pmi", 2, tables)
    kept = filter_pmi(pmi_scores, tables, min_count=20, threshold=2.0)
    print(f"pmi filter kept {len(kept.scores)}/{len(pmi_scores)} bigrams:")
    for ngram in sorted(kept.scores):
        print(f"  {ngram}")

    llr_scores = score_all("llr", 2, tables)
    kept = filter_top_percent(llr_scores, "llr", percent=5.0)
    print(f"\nllr top-5% kept {len(kept.scores)}/{len(llr_scores)} bigrams:")
    for ngram in sorted(kept.scores):
        print(f"  {ngram}")


if __name__ == "__main__":
    main()
