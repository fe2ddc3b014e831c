"""Text decomposition into 1- to 4-token chunks.

Three families of methods share one contract (the chunk lists always flatten
back to the source tokens, in order):

  * greedy longest-match against an association lexicon,
  * greedy longest-match against a multiword-lemma lexicon,
  * IOB chunking via a POS-bigram tagger trained on CoNLL-2000 data.

Boundary stopwords of matched n-grams are peeled off as standalone
pass-through chunks; internal stopwords stay inside the chunk.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .association import AssocScoreSet
from .textprep import StopwordSet

MAX_CHUNK_TOKENS = 4


@dataclass(frozen=True)
class Chunk:
    tokens: tuple[str, ...]
    privatize: bool = True

    @property
    def key(self) -> str:
        return "_".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class ChunkedDocument:
    chunks: list[Chunk]
    source_tokens: list[str]

    def flatten(self) -> list[str]:
        return [t for c in self.chunks for t in c.tokens]


@dataclass
class ChunkLexicon:
    """Space-joined n-gram sets, one per order 2..4."""

    by_order: dict[int, set[str]] = field(default_factory=dict)

    def contains(self, ngram: str, n: int) -> bool:
        return ngram in self.by_order.get(n, ())

    @classmethod
    def from_score_sets(cls, score_sets: Iterable[AssocScoreSet]) -> "ChunkLexicon":
        by_order: dict[int, set[str]] = defaultdict(set)
        for ss in score_sets:
            for ngram in ss.scores:
                n = len(ngram.split())
                if 2 <= n <= MAX_CHUNK_TOKENS:
                    by_order[n].add(ngram)
        return cls(dict(by_order))

    @classmethod
    def from_lemma_file(cls, path) -> "ChunkLexicon":
        """Load underscore-joined multiword entries, one per line."""
        by_order: dict[int, set[str]] = defaultdict(set)
        with open(path, encoding="utf-8") as f:
            for line in f:
                entry = line.strip().lower()
                if not entry:
                    continue
                words = entry.split("_")
                if 2 <= len(words) <= MAX_CHUNK_TOKENS:
                    by_order[len(words)].add(" ".join(words))
        return cls(dict(by_order))


def process_stopwords(
    ngram_tokens: Sequence[str], stopwords: StopwordSet
) -> list[Chunk]:
    """Peel boundary stopwords off a matched n-gram, keeping internal ones.

    Peeling is iterative: after removing a boundary stopword the new boundary
    is re-examined, so the surviving core never starts or ends with a
    stopword. Peeled stopwords become standalone pass-through chunks.
    """
    if not 2 <= len(ngram_tokens) <= MAX_CHUNK_TOKENS:
        raise ValueError(f"expected 2..4 tokens, got {len(ngram_tokens)}")
    core = list(ngram_tokens)
    head: list[Chunk] = []
    tail: list[Chunk] = []
    while core and core[0] in stopwords:
        head.append(Chunk((core.pop(0),), privatize=False))
    while core and core[-1] in stopwords:
        tail.insert(0, Chunk((core.pop(),), privatize=False))
    middle = [Chunk(tuple(core))] if core else []
    return head + middle + tail


def _singleton(token: str, stopwords: StopwordSet) -> Chunk:
    return Chunk((token,), privatize=token not in stopwords)


def greedy_chunk(
    tokens: Sequence[str],
    lexicon: ChunkLexicon,
    stopwords: StopwordSet,
    strip_boundary_stopwords: bool = True,
) -> ChunkedDocument:
    """Left-to-right scan taking the longest lexicon match at each position.

    Quad-grams are tried before trigrams before bigrams; on a match the scan
    advances past the whole n-gram, otherwise a single-token chunk is
    emitted. Tokens are expected lowercase (one sentence or one document).
    """
    chunks: list[Chunk] = []
    i = 0
    n_tokens = len(tokens)
    while i < n_tokens:
        matched = False
        for n in range(MAX_CHUNK_TOKENS, 1, -1):
            if i + n <= n_tokens:
                ngram = " ".join(tokens[i : i + n])
                if lexicon.contains(ngram, n):
                    if strip_boundary_stopwords:
                        chunks.extend(
                            process_stopwords(tokens[i : i + n], stopwords)
                        )
                    else:
                        chunks.append(Chunk(tuple(tokens[i : i + n])))
                    i += n
                    matched = True
                    break
        if not matched:
            chunks.append(_singleton(tokens[i], stopwords))
            i += 1
    return ChunkedDocument(chunks=chunks, source_tokens=list(tokens))


def lexicon_chunk(
    tokens: Sequence[str],
    lexicon: ChunkLexicon,
    stopwords: StopwordSet,
    strip_boundary_stopwords: bool = True,
) -> ChunkedDocument:
    """Same scan as greedy_chunk over a multiword-lemma lexicon."""
    return greedy_chunk(tokens, lexicon, stopwords, strip_boundary_stopwords)


class ConllParseError(ValueError):
    pass


def _parse_conll(lines: Iterable[str]) -> list[list[tuple[str, str, str]]]:
    """CoNLL-2000 columns: token, POS, IOB chunk tag; blank line ends a sentence."""
    sentences: list[list[tuple[str, str, str]]] = []
    current: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            if current:
                sentences.append(current)
                current = []
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ConllParseError(
                f"line {lineno}: expected 'token POS chunk-tag', got {line!r}"
            )
        current.append((fields[0], fields[1], fields[2]))
    if current:
        sentences.append(current)
    return sentences


def _most_frequent(counter: Counter) -> str:
    # Ties break toward the lexicographically smallest tag.
    top = max(counter.values())
    return min(tag for tag, cnt in counter.items() if cnt == top)


@dataclass
class ChunkTaggerModel:
    """POS -> IOB chunk tag model with bigram -> unigram -> default backoff."""

    bigram_rules: dict[tuple[str, str], str] = field(default_factory=dict)
    unigram_rules: dict[str, str] = field(default_factory=dict)
    default_tag: str = "O"

    def tag(self, pos_tags: Sequence[str]) -> list[str]:
        out: list[str] = []
        for i, pos in enumerate(pos_tags):
            tag = None
            if i > 0:
                tag = self.bigram_rules.get((pos_tags[i - 1], pos))
            if tag is None:
                tag = self.unigram_rules.get(pos, self.default_tag)
            out.append(tag)
        return out


def train_chunk_tagger(conll_lines: Iterable[str]) -> ChunkTaggerModel:
    """Most-frequent-tag rules per POS bigram context and per POS."""
    bigram_counts: dict[tuple[str, str], Counter] = defaultdict(Counter)
    unigram_counts: dict[str, Counter] = defaultdict(Counter)
    for sentence in _parse_conll(conll_lines):
        prev_pos = None
        for _token, pos, tag in sentence:
            unigram_counts[pos][tag] += 1
            if prev_pos is not None:
                bigram_counts[(prev_pos, pos)][tag] += 1
            prev_pos = pos
    return ChunkTaggerModel(
        bigram_rules={k: _most_frequent(c) for k, c in bigram_counts.items()},
        unigram_rules={k: _most_frequent(c) for k, c in unigram_counts.items()},
    )


@dataclass
class UnigramPosTagger:
    """token -> most frequent POS lookup; unseen tokens default to NN."""

    rules: dict[str, str] = field(default_factory=dict)
    default_pos: str = "NN"

    def tag(self, tokens: Sequence[str]) -> list[str]:
        return [self.rules.get(t, self.default_pos) for t in tokens]


def train_pos_tagger(conll_lines: Iterable[str]) -> UnigramPosTagger:
    counts: dict[str, Counter] = defaultdict(Counter)
    for sentence in _parse_conll(conll_lines):
        for token, pos, _tag in sentence:
            counts[token.lower()][pos] += 1
    return UnigramPosTagger(rules={t: _most_frequent(c) for t, c in counts.items()})


def _iob_runs(chunk_tags: Sequence[str]) -> list[tuple[int, int]]:
    """Maximal [start, end) runs of same-type B-X/I-X tags; O breaks runs."""
    runs: list[tuple[int, int]] = []
    i, n = 0, len(chunk_tags)
    while i < n:
        tag = chunk_tags[i]
        if tag == "O":
            runs.append((i, i + 1))
            i += 1
            continue
        chunk_type = tag.split("-", 1)[-1]
        j = i + 1
        while j < n and chunk_tags[j] == f"I-{chunk_type}":
            j += 1
        runs.append((i, j))
        i = j
    return runs


def pos_chunk(
    tokens: Sequence[str],
    pos_tags: Sequence[str],
    model: ChunkTaggerModel,
    stopwords: StopwordSet,
    strip_boundary_stopwords: bool = True,
) -> ChunkedDocument:
    """Group IOB runs assigned by the chunk tagger into chunks.

    Runs longer than 4 tokens split left-to-right into 4-token pieces (the
    chunk vocabulary only goes up to quad-grams); singleton runs and O tags
    emit single-token chunks.
    """
    if len(tokens) != len(pos_tags):
        raise ValueError(
            f"tokens/pos length mismatch: {len(tokens)} vs {len(pos_tags)}"
        )
    chunk_tags = model.tag(pos_tags)
    chunks: list[Chunk] = []
    for start, end in _iob_runs(chunk_tags):
        for piece_start in range(start, end, MAX_CHUNK_TOKENS):
            piece = list(tokens[piece_start : min(piece_start + MAX_CHUNK_TOKENS, end)])
            if len(piece) < 2:
                chunks.append(_singleton(piece[0], stopwords))
            elif strip_boundary_stopwords:
                chunks.extend(process_stopwords(piece, stopwords))
            else:
                chunks.append(Chunk(tuple(piece)))
    return ChunkedDocument(chunks=chunks, source_tokens=list(tokens))
