"""Streaming n-gram frequency extraction and table persistence.

Counting windows never cross sentence boundaries, matching the per-sentence
scan used by the decomposition stage. The unigram total N is counted before
any min-count pruning: association measures need the true corpus size.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .textprep import split_sentences, tokenize

N_MAX_LIMIT = 4


class NgramTableError(ValueError):
    pass


@dataclass
class NgramTable:
    """Frequency counts for one n-gram order, keyed by space-joined n-gram."""

    n: int
    counts: dict[str, int] = field(default_factory=dict)
    total_unigrams: int = 0

    def frequency(self, ngram: str) -> int:
        return self.counts.get(ngram, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NgramTable):
            return NotImplemented
        return (
            self.n == other.n
            and self.counts == other.counts
            and self.total_unigrams == other.total_unigrams
        )


def frequency(table: NgramTable, ngram: str) -> int:
    return table.frequency(ngram)


def count_shard(lines: Iterable[str], n_max: int) -> tuple[list[Counter], int]:
    """Count one shard of a line-oriented corpus; returns raw counters and N."""
    if not 1 <= n_max <= N_MAX_LIMIT:
        raise NgramTableError(f"n_max must be in 1..{N_MAX_LIMIT}, got {n_max}")
    counters: list[Counter] = [Counter() for _ in range(n_max)]
    total = 0
    for line in lines:
        for sentence in split_sentences(line):
            tokens = tokenize(sentence)
            total += len(tokens)
            for n in range(1, n_max + 1):
                counter = counters[n - 1]
                for i in range(len(tokens) - n + 1):
                    counter[" ".join(tokens[i : i + n])] += 1
    return counters, total


def merge_shards(
    shards: Iterable[tuple[list[Counter], int]], n_max: int, min_count: int = 1
) -> list[NgramTable]:
    """Sum shard counters key-wise, then prune below min_count."""
    merged: list[Counter] = [Counter() for _ in range(n_max)]
    total = 0
    for counters, shard_total in shards:
        total += shard_total
        for n in range(n_max):
            merged[n].update(counters[n])
    tables = []
    for n in range(1, n_max + 1):
        counts = {k: c for k, c in merged[n - 1].items() if c >= min_count}
        tables.append(NgramTable(n=n, counts=counts, total_unigrams=total))
    return tables


def extract_ngrams(
    lines: Iterable[str], n_max: int = 4, min_count: int = 5
) -> list[NgramTable]:
    """One frequency table per order 1..n_max from a line-oriented corpus."""
    if min_count < 1:
        raise NgramTableError(f"min_count must be >= 1, got {min_count}")
    shard = count_shard(lines, n_max)
    return merge_shards([shard], n_max, min_count=min_count)


def save_table(table: NgramTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#ngram_table n={table.n} N={table.total_unigrams}\n")
        for ngram in sorted(table.counts):
            f.write(f"{ngram}\t{table.counts[ngram]}\n")


def load_table(path) -> NgramTable:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        m = _parse_header(header, path)
        table = NgramTable(n=m[0], total_unigrams=m[1])
        for lineno, line in enumerate(f, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise NgramTableError(
                    f"{path}:{lineno}: expected '<ngram>\\t<count>'"
                )
            try:
                count = int(fields[1])
            except ValueError:
                raise NgramTableError(
                    f"{path}:{lineno}: non-integer count {fields[1]!r}"
                ) from None
            table.counts[fields[0]] = count
    return table


def _parse_header(header: str, path) -> tuple[int, int]:
    parts = header.split()
    if (
        len(parts) != 3
        or parts[0] != "#ngram_table"
        or not parts[1].startswith("n=")
        or not parts[2].startswith("N=")
    ):
        raise NgramTableError(f"{path}:1: bad header {header!r}")
    try:
        return int(parts[1][2:]), int(parts[2][2:])
    except ValueError:
        raise NgramTableError(f"{path}:1: bad header {header!r}") from None
