"""Decomposing sentences into 1-4 token chunks.

Shows the greedy longest-match scan against a lexicon, boundary-stopword
peeling, and the POS/IOB route trained from CoNLL-format data.

Run: python3 demos/02_decomposition.py
"""

from chunkdp import (
    ChunkLexicon,
    StopwordSet,
    greedy_chunk,
    pos_chunk,
    tokenize,
    train_chunk_tagger,
    train_pos_tagger,
)

CONLL_SAMPLE = """\
the DT B-NP
new JJ I-NP
york NNP I-NP
city NNP I-NP
council NN I-NP
approved VBD B-VP
the DT B-NP
budget NN I-NP
. . O

we PRP B-NP
paid VBD B-VP
the DT B-NP
credit NN I-NP
card NN I-NP
bill NN I-NP
. . O
"""


def show(title, doc):
    print(title)
    for chunk in doc.chunks:
        marker = "priv" if chunk.privatize else "pass"
        print(f"  [{marker}] {' '.join(chunk.tokens)}")
    print()


def main():
    stopwords = StopwordSet.default()
    lexicon = ChunkLexicon(
        {
            2: {"credit card", "city hall"},
            3: {"new york city"},
            4: {"state of the art"},
        }
    )

    text = "We lost the credit card near the state of the art city hall in New York City."
    tokens = tokenize(text)

    show("greedy longest-match:", greedy_chunk(tokens, lexicon, stopwords))

    # boundary stopwords of a matched n-gram are peeled into pass-through
    # singletons; turning that off keeps the raw match
    show(
        "without boundary-stopword peeling:",
        greedy_chunk(tokens, lexicon, stopwords, strip_boundary_stopwords=False),
    )

    lines = CONLL_SAMPLE.splitlines(keepends=True)
    chunk_tagger = train_chunk_tagger(lines)
    pos_tagger = train_pos_tagger(lines)
    tokens = tokenize("The new york city council paid the credit card bill.")
    show(
        "pos/IOB chunking:",
        pos_chunk(tokens, pos_tagger.tag(tokens), chunk_tagger, stopwords),
    )


if __name__ == "__main__":
    main()
