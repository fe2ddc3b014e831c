"""Association measures (PMI, LLR, t-score) over n-gram frequency tables,
plus the threshold filters that turn raw scores into chunking lexicons.

Conventions for an n-gram (w1..wn) with observed count c and unigram total N:

  PMI     = log2(c * N^(n-1) / (c(w1) * ... * c(wn)))
  t-score = (c - expected) / sqrt(c),  expected = prod(c(wi)) / N^(n-1)
  LLR     = G-statistic of a 2x2 contingency table contrasting the first
            word against the trailing (n-1)-gram (the bigram table when n=2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .ngrams import NgramTable

MEASURES = ("pmi", "llr", "tscore")

PMI_MIN_COUNT = 275
PMI_THRESHOLD = 2.0
TOP_PERCENT = 5.0


class UndefinedScoreError(ValueError):
    """A component count needed by the measure is zero or missing."""


class ContingencyError(ValueError):
    """Derived 2x2 cell count went negative (inconsistent tables)."""


@dataclass
class AssocScoreSet:
    measure: str
    n: int
    scores: dict[str, float] = field(default_factory=dict)
    provenance: str = ""

    def sorted_items(self) -> list[tuple[str, float]]:
        """Deterministic order: score descending, then n-gram ascending."""
        return sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))


def _component_counts(words: list[str], tables: Mapping[int, NgramTable]) -> list[int]:
    uni = tables[1]
    return [uni.frequency(w) for w in words]


def _require(tables: Mapping[int, NgramTable], n: int) -> NgramTable:
    if n not in tables:
        raise UndefinedScoreError(f"no order-{n} table available")
    return tables[n]


def pmi(ngram: str, tables: Mapping[int, NgramTable]) -> float:
    words = ngram.split()
    n = len(words)
    if n < 2:
        raise UndefinedScoreError("PMI needs an n-gram of order >= 2")
    observed = _require(tables, n).frequency(ngram)
    if observed == 0:
        raise UndefinedScoreError(f"zero count for {ngram!r}")
    unigrams = _component_counts(words, tables)
    if any(c == 0 for c in unigrams):
        raise UndefinedScoreError(f"zero component count in {ngram!r}")
    big_n = tables[1].total_unigrams
    if big_n <= 0:
        raise UndefinedScoreError("empty corpus (N = 0)")
    return math.log2(observed * big_n ** (n - 1) / math.prod(unigrams))


def t_score(ngram: str, tables: Mapping[int, NgramTable]) -> float:
    words = ngram.split()
    n = len(words)
    if n < 2:
        raise UndefinedScoreError("t-score needs an n-gram of order >= 2")
    observed = _require(tables, n).frequency(ngram)
    if observed == 0:
        raise UndefinedScoreError(f"zero count for {ngram!r}")
    unigrams = _component_counts(words, tables)
    big_n = tables[1].total_unigrams
    if big_n <= 0:
        raise UndefinedScoreError("empty corpus (N = 0)")
    expected = math.prod(unigrams) / big_n ** (n - 1)
    return (observed - expected) / math.sqrt(observed)


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def llr_from_cells(c11: float, c12: float, c21: float, c22: float) -> float:
    """G-statistic of a 2x2 table, with the 0*log(0) = 0 convention."""
    if min(c11, c12, c21, c22) < 0:
        raise ContingencyError(
            f"negative contingency cell: {(c11, c12, c21, c22)}"
        )
    total = c11 + c12 + c21 + c22
    return 2.0 * (
        _xlogx(total)
        - _xlogx(c11 + c12)
        - _xlogx(c21 + c22)
        - _xlogx(c11 + c21)
        - _xlogx(c12 + c22)
        + _xlogx(c11)
        + _xlogx(c12)
        + _xlogx(c21)
        + _xlogx(c22)
    )


def llr(ngram: str, tables: Mapping[int, NgramTable]) -> float:
    """LLR of the n-gram, contrasting its first word with the rest.

    For n > 2 the second contingency unit is the trailing (n-1)-gram, which
    reduces exactly to the usual word-vs-word table when n = 2.
    """
    words = ngram.split()
    n = len(words)
    if n < 2:
        raise UndefinedScoreError("LLR needs an n-gram of order >= 2")
    observed = _require(tables, n).frequency(ngram)
    if observed == 0:
        raise UndefinedScoreError(f"zero count for {ngram!r}")
    first = tables[1].frequency(words[0])
    if n == 2:
        rest = tables[1].frequency(words[1])
    else:
        rest = _require(tables, n - 1).frequency(" ".join(words[1:]))
    if first == 0 or rest == 0:
        raise UndefinedScoreError(f"zero unit count in {ngram!r}")
    big_n = tables[1].total_unigrams
    c11 = observed
    c12 = rest - observed
    c21 = first - observed
    c22 = big_n - first - rest + observed
    return llr_from_cells(c11, c12, c21, c22)


_MEASURE_FN = {"pmi": pmi, "llr": llr, "tscore": t_score}


def score_all(
    measure: str, n: int, tables: Mapping[int, NgramTable]
) -> dict[str, float]:
    """Score every order-n entry; entries with undefined scores are skipped."""
    if measure not in _MEASURE_FN:
        raise ValueError(f"unknown measure {measure!r}")
    fn = _MEASURE_FN[measure]
    scores: dict[str, float] = {}
    for ngram in tables[n].counts:
        try:
            scores[ngram] = fn(ngram, tables)
        except UndefinedScoreError:
            continue
    return scores


def filter_pmi(
    scores: Mapping[str, float],
    tables: Mapping[int, NgramTable],
    min_count: int = PMI_MIN_COUNT,
    threshold: float = PMI_THRESHOLD,
) -> AssocScoreSet:
    """Keep entries with frequency >= min_count and PMI strictly > threshold."""
    n = 0
    kept: dict[str, float] = {}
    for ngram, score in scores.items():
        n = len(ngram.split())
        if tables[n].frequency(ngram) >= min_count and score > threshold:
            kept[ngram] = score
    return AssocScoreSet(
        measure="pmi",
        n=n,
        scores=kept,
        provenance=f"count>={min_count},pmi>{threshold}",
    )


def filter_top_percent(
    scores: Mapping[str, float], measure: str, percent: float = TOP_PERCENT
) -> AssocScoreSet:
    """Keep the ceil(p% * |scores|) best entries; boundary ties all survive."""
    if not 0 < percent <= 100:
        raise ValueError(f"percent must be in (0, 100], got {percent}")
    n = len(next(iter(scores)).split()) if scores else 0
    kept: dict[str, float] = {}
    if scores:
        keep = math.ceil(percent / 100.0 * len(scores))
        cutoff = sorted(scores.values(), reverse=True)[keep - 1]
        kept = {k: v for k, v in scores.items() if v >= cutoff}
    return AssocScoreSet(
        measure=measure, n=n, scores=kept, provenance=f"top{percent}%"
    )


def save_scores(scoreset: AssocScoreSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#assoc measure={scoreset.measure} n={scoreset.n}\n")
        for ngram, score in scoreset.sorted_items():
            f.write(f"{ngram}\t{score!r}\n")


def load_scores(path) -> AssocScoreSet:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split()
        if (
            len(header) != 3
            or header[0] != "#assoc"
            or not header[1].startswith("measure=")
            or not header[2].startswith("n=")
        ):
            raise ValueError(f"{path}:1: bad score file header")
        scoreset = AssocScoreSet(measure=header[1][8:], n=int(header[2][2:]))
        for lineno, line in enumerate(f, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected '<ngram>\\t<score>'")
            try:
                scoreset.scores[fields[0]] = float(fields[1])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-numeric score {fields[1]!r}"
                ) from None
    return scoreset
