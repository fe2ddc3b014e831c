"""Shared text preparation: tokenization, sentence splitting, stopwords, contractions.

All downstream stages (n-gram counting, decomposition, budgeting, the
perturbation mechanism) rely on the exact same word-boundary tokenizer, so
it lives here and nowhere else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

WORD_RE = re.compile(r"\b\w+\b")

# Split after terminal punctuation followed by whitespace. Deliberately has
# no abbreviation handling: "Mr. Smith" splits after "Mr.".
_SENT_RE = re.compile(r"(?<=[.!?])\s+")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens in document order.

    Tokens are maximal runs of word characters; punctuation and apostrophes
    act as separators, so contractions split in two ("don't" -> don, t).
    """
    return [m.group(0).lower() for m in WORD_RE.finditer(text)]


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence split on '.', '!', '?' followed by whitespace."""
    parts = [s.strip() for s in _SENT_RE.split(text)]
    return [s for s in parts if s]


@dataclass(frozen=True)
class StopwordSet:
    """Exact-match stopword membership over lowercase tokens."""

    words: frozenset[str]

    def __contains__(self, token: str) -> bool:
        return token in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_file(cls, path) -> "StopwordSet":
        with open(path, encoding="utf-8") as f:
            words = frozenset(line.strip() for line in f if line.strip())
        return cls(words)

    @classmethod
    def default(cls) -> "StopwordSet":
        ref = resources.files("chunkdp.data").joinpath("stopwords.txt")
        with ref.open(encoding="utf-8") as f:
            words = frozenset(line.strip() for line in f if line.strip())
        return cls(words)


@dataclass(frozen=True)
class ContractionTable:
    """Maps adjacent token pairs back to their apostrophized surface form.

    File format: one rule per line, "first<TAB>second<TAB>merged".
    """

    pairs: dict[tuple[str, str], str] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path) -> "ContractionTable":
        pairs: dict[tuple[str, str], str] = {}
        with open(path, encoding="utf-8") as f:
            cls._parse(f, pairs, str(path))
        return cls(pairs)

    @classmethod
    def default(cls) -> "ContractionTable":
        pairs: dict[tuple[str, str], str] = {}
        ref = resources.files("chunkdp.data").joinpath("contractions.tsv")
        with ref.open(encoding="utf-8") as f:
            cls._parse(f, pairs, "contractions.tsv")
        return cls(pairs)

    @staticmethod
    def _parse(lines: Iterable[str], out: dict, name: str) -> None:
        for i, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"{name}:{i}: expected 3 tab-separated fields")
            first, second, merged = fields
            out[(first.lower(), second.lower())] = merged


def merge_contractions(tokens: list[str], table: ContractionTable) -> list[str]:
    """Recombine adjacent token pairs that form a known contraction.

    Scans left to right; merged output is never re-examined, so each input
    token participates in at most one merge.
    """
    out: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        if i + 1 < n and (tokens[i], tokens[i + 1]) in table.pairs:
            out.append(table.pairs[(tokens[i], tokens[i + 1])])
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return out
