"""End-to-end orchestration: dataset I/O, privacy-level arithmetic, the
per-document privatize path (decompose -> distribute -> aggregate -> perturb
-> reconstruct), multi-config experiment runs, and the budget ledger.

Randomness contract: every document gets its own deterministic stream
derived from (global seed, doc_id), so results are byte-identical no matter
how documents are ordered or how many workers process them.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import budgeting, decomposition, mechanism, metrics
from .association import load_scores
from .budgeting import BudgetAllocation, ScoreFile
from .decomposition import (
    Chunk,
    ChunkLexicon,
    ChunkTaggerModel,
    UnigramPosTagger,
    greedy_chunk,
    pos_chunk,
    train_chunk_tagger,
    train_pos_tagger,
)
from .mechanism import EmbeddingStore, load_embeddings, perturb_chunk, postprocess
from .ngrams import NgramTable, load_table
from .textprep import ContractionTable, StopwordSet, split_sentences, tokenize

log = logging.getLogger("chunkdp")

# name -> per-word base epsilon
PRIVACY_LEVELS = {"high": 0.1, "medium": 1.0, "low": 5.0}

DECOMPOSITION_METHODS = ("pmi", "llr", "tscore", "pos", "lexicon")
DISTRIBUTION_METHODS = ("uniform", "ic_table", "corpus_ic", "external")

# Defaults for whether a scorer's output should be inverted before budget
# allocation (high importance -> low epsilon). External score files carry
# their own flag.
DEFAULT_INVERT = {"uniform": False, "ic_table": True, "corpus_ic": True}


class PipelineError(ValueError):
    pass


def compute_doc_epsilon(avg_doc_length_words: float, base: float) -> float:
    """Document-level budget: base per-word epsilon times average doc length.

    Full precision; use round(eps, 1) for reporting.
    """
    if avg_doc_length_words <= 0:
        raise PipelineError(
            f"average document length must be > 0, got {avg_doc_length_words}"
        )
    if base <= 0:
        raise PipelineError(f"base epsilon must be > 0, got {base}")
    return avg_doc_length_words * base


@dataclass
class RunConfig:
    dataset: str  # path to a JSONL dataset
    decomposition: str
    distribution: str
    level: str  # high | medium | low
    seed: int = 42
    out: str | None = None
    workers: int = 1
    # resources
    stopwords_path: str | None = None
    contractions_path: str | None = None
    embeddings_path: str | None = None
    lexicon_paths: tuple[str, ...] = ()  # association score files or lemma file
    lemma_path: str | None = None
    conll_path: str | None = None
    unigram_table_path: str | None = None
    ic_table_path: str | None = None
    score_file_path: str | None = None
    invert: bool | None = None  # override the distributor default
    strip_boundary_stopwords: bool = True
    avg_doc_length: float | None = None  # override the computed average

    def validate(self) -> None:
        if self.decomposition not in DECOMPOSITION_METHODS:
            raise PipelineError(f"unknown decomposition {self.decomposition!r}")
        if self.distribution not in DISTRIBUTION_METHODS:
            raise PipelineError(f"unknown distribution {self.distribution!r}")
        if self.level not in PRIVACY_LEVELS:
            raise PipelineError(f"unknown privacy level {self.level!r}")
        if self.embeddings_path is None:
            raise PipelineError("embeddings_path is required")
        if self.decomposition in ("pmi", "llr", "tscore") and not self.lexicon_paths:
            raise PipelineError(f"{self.decomposition} requires lexicon_paths")
        if self.decomposition == "lexicon" and not (
            self.lemma_path or self.lexicon_paths
        ):
            raise PipelineError("lexicon decomposition requires lemma_path")
        if self.decomposition == "pos" and not self.conll_path:
            raise PipelineError("pos decomposition requires conll_path")
        if self.distribution == "ic_table" and not self.ic_table_path:
            raise PipelineError("ic_table distribution requires ic_table_path")
        if self.distribution == "corpus_ic" and not self.unigram_table_path:
            raise PipelineError("corpus_ic distribution requires unigram_table_path")
        if self.distribution == "external" and not self.score_file_path:
            raise PipelineError("external distribution requires score_file_path")


@dataclass
class PipelineResources:
    stopwords: StopwordSet
    contractions: ContractionTable
    store: EmbeddingStore
    decomposition: str
    distribution: str
    invert: bool
    strip_boundary_stopwords: bool = True
    lexicon: ChunkLexicon | None = None
    chunk_tagger: ChunkTaggerModel | None = None
    pos_tagger: UnigramPosTagger | None = None
    ic_table: dict[str, float] | None = None
    unigram_table: NgramTable | None = None
    score_file: ScoreFile | None = None

    @classmethod
    def load(cls, config: RunConfig) -> "PipelineResources":
        config.validate()
        stopwords = (
            StopwordSet.from_file(config.stopwords_path)
            if config.stopwords_path
            else StopwordSet.default()
        )
        contractions = (
            ContractionTable.from_file(config.contractions_path)
            if config.contractions_path
            else ContractionTable.default()
        )
        res = cls(
            stopwords=stopwords,
            contractions=contractions,
            store=load_embeddings(config.embeddings_path),
            decomposition=config.decomposition,
            distribution=config.distribution,
            invert=(
                config.invert
                if config.invert is not None
                else DEFAULT_INVERT.get(config.distribution, False)
            ),
            strip_boundary_stopwords=config.strip_boundary_stopwords,
        )
        if config.decomposition in ("pmi", "llr", "tscore"):
            res.lexicon = ChunkLexicon.from_score_sets(
                load_scores(p) for p in config.lexicon_paths
            )
        elif config.decomposition == "lexicon":
            res.lexicon = ChunkLexicon.from_lemma_file(
                config.lemma_path or config.lexicon_paths[0]
            )
        elif config.decomposition == "pos":
            with open(config.conll_path, encoding="utf-8") as f:
                lines = f.readlines()
            res.chunk_tagger = train_chunk_tagger(lines)
            res.pos_tagger = train_pos_tagger(lines)
        if config.ic_table_path:
            res.ic_table = budgeting.load_ic_table(config.ic_table_path)
        if config.unigram_table_path:
            res.unigram_table = load_table(config.unigram_table_path)
        if config.score_file_path:
            res.score_file = ScoreFile.load(config.score_file_path)
        return res

    def decompose(self, tokens: Sequence[str]) -> list[Chunk]:
        if self.decomposition == "pos":
            doc = pos_chunk(
                tokens,
                self.pos_tagger.tag(tokens),
                self.chunk_tagger,
                self.stopwords,
                self.strip_boundary_stopwords,
            )
        else:
            doc = greedy_chunk(
                tokens, self.lexicon, self.stopwords, self.strip_boundary_stopwords
            )
        return doc.chunks

    def word_scores(self, doc_id: str, tokens: Sequence[str]) -> tuple[list[float], bool]:
        """Raw per-token scores plus the effective invert flag."""
        invert = self.invert
        if self.distribution == "uniform":
            pairs = budgeting.uniform_scores(tokens)
        elif self.distribution == "ic_table":
            pairs = budgeting.ic_table_scores(tokens, self.ic_table)
        elif self.distribution == "corpus_ic":
            pairs = budgeting.corpus_ic_scores(tokens, self.unigram_table)
        else:
            rec = self.score_file.get(doc_id)
            pairs = budgeting.external_scores(doc_id, self.score_file, tokens)
            invert = bool(rec.get("invert", False))
        return [s for _, s in pairs], invert


@dataclass
class PrivatizedRecord:
    doc_id: str
    private_text: str
    ledger: list[tuple[str, float, str]]  # (chunk key, epsilon, mode)
    doc_epsilon: float
    all_stopwords: bool = False

    def replacements(self) -> list[tuple[str, str]]:
        """(original key, replacement key) pairs for perturbed chunks."""
        return [
            (key, repl)
            for (key, _eps, mode), repl in zip(self.ledger, self._out_keys)
            if mode in ("none", "per_word", "pass_through")
        ]

    _out_keys: list[str] = field(default_factory=list, repr=False)


def _doc_rng(seed: int, doc_id: str) -> np.random.Generator:
    digest = hashlib.sha256(str(doc_id).encode("utf-8")).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "big")])
    )


def privatize_document(
    doc_id: str,
    text: str,
    res: PipelineResources,
    doc_epsilon: float,
    seed: int,
) -> PrivatizedRecord:
    """Privatize one document under its document-level budget.

    All-stopword documents (no positive converted score anywhere) pass
    through unchanged and are flagged. Privatizable chunks that end up with
    a zero budget share also pass through, recorded as "zero_budget".
    """
    rng = _doc_rng(seed, doc_id)
    tokens: list[str] = []
    chunks: list[Chunk] = []
    for sentence in split_sentences(text):
        sent_tokens = tokenize(sentence)
        tokens.extend(sent_tokens)
        chunks.extend(res.decompose(sent_tokens))

    if not tokens:
        return PrivatizedRecord(
            doc_id=doc_id, private_text="", ledger=[], doc_epsilon=doc_epsilon
        )

    raw_scores, invert = res.word_scores(doc_id, tokens)
    alloc: BudgetAllocation = budgeting.convert_scores(
        raw_scores, tokens, doc_epsilon, invert, res.stopwords
    )
    per_chunk = budgeting.chunk_budgets(alloc, chunks)
    all_zero = all(eps == 0.0 for _, eps in per_chunk)

    ledger: list[tuple[str, float, str]] = []
    out_keys: list[str] = []
    for chunk, (key, eps) in zip(chunks, per_chunk):
        if not chunk.privatize:
            ledger.append((key, eps, "stopword"))
            out_keys.append(key)
        elif eps <= 0.0:
            ledger.append((key, eps, "zero_budget"))
            out_keys.append(key)
        else:
            perturbed = mechanism.perturb_chunk(chunk, eps, res.store, rng)
            ledger.append((key, eps, perturbed.fallback_mode.value))
            out_keys.append(perturbed.replacement_key)

    record = PrivatizedRecord(
        doc_id=doc_id,
        private_text=postprocess(out_keys, res.contractions),
        ledger=ledger,
        doc_epsilon=doc_epsilon,
        all_stopwords=all_zero,
    )
    record._out_keys = out_keys
    return record


def read_dataset(path) -> list[dict]:
    """Line-delimited records {"doc_id", "text", "labels": {...}}."""
    docs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise PipelineError(f"{path}:{lineno}: bad JSON ({e})") from None
            if "doc_id" not in rec or "text" not in rec:
                raise PipelineError(f"{path}:{lineno}: missing doc_id/text")
            docs.append(rec)
    return docs


def average_doc_length(docs: Iterable[dict]) -> float:
    lengths = [len(tokenize(d["text"])) for d in docs]
    if not lengths:
        raise PipelineError("empty dataset")
    return sum(lengths) / len(lengths)


def _record_to_json(record: PrivatizedRecord, labels) -> str:
    obj = {
        "doc_id": record.doc_id,
        "text": record.private_text,
        "labels": labels,
        "doc_epsilon": record.doc_epsilon,
        "all_stopwords": record.all_stopwords,
        "ledger": [[k, e, m] for k, e, m in record.ledger],
    }
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


# Worker-process state for the pool: resources are loaded once per worker
# from the config, not pickled per task.
_WORKER: dict = {}


def _init_worker(config: RunConfig, doc_epsilon: float) -> None:
    _WORKER["res"] = PipelineResources.load(config)
    _WORKER["eps"] = doc_epsilon
    _WORKER["seed"] = config.seed


def _privatize_one(doc: dict) -> PrivatizedRecord:
    return privatize_document(
        str(doc["doc_id"]), doc["text"], _WORKER["res"], _WORKER["eps"], _WORKER["seed"]
    )


@dataclass
class RunReport:
    n_docs: int = 0
    n_all_stopword_docs: int = 0
    n_pass_through: int = 0
    n_per_word_fallback: int = 0
    n_zero_budget: int = 0
    n_failures: int = 0
    failures: list[tuple[str, str]] = field(default_factory=list)

    def observe(self, record: PrivatizedRecord) -> None:
        self.n_docs += 1
        if record.all_stopwords:
            self.n_all_stopword_docs += 1
        for _key, _eps, mode in record.ledger:
            if mode == "pass_through":
                self.n_pass_through += 1
            elif mode == "per_word":
                self.n_per_word_fallback += 1
            elif mode == "zero_budget":
                self.n_zero_budget += 1


def privatize_dataset(
    config: RunConfig,
    docs: list[dict] | None = None,
    progress: Callable[[int, int], None] | None = None,
) -> tuple[list[PrivatizedRecord], RunReport]:
    """Privatize every document of a dataset under one shared doc epsilon.

    Failed documents are quarantined (recorded in the report) instead of
    aborting the run. Output order matches input order.
    """
    if docs is None:
        docs = read_dataset(config.dataset)
    avg_len = (
        config.avg_doc_length
        if config.avg_doc_length is not None
        else average_doc_length(docs)
    )
    doc_epsilon = compute_doc_epsilon(avg_len, PRIVACY_LEVELS[config.level])
    log.info(
        "privatize: %d docs, level=%s, doc_epsilon=%.1f, seed=%d, workers=%d",
        len(docs), config.level, round(doc_epsilon, 1), config.seed, config.workers,
    )

    report = RunReport()
    records: list[PrivatizedRecord] = []
    if config.workers > 1:
        with ProcessPoolExecutor(
            max_workers=config.workers,
            initializer=_init_worker,
            initargs=(config, doc_epsilon),
        ) as pool:
            for i, record in enumerate(pool.map(_privatize_one, docs, chunksize=8)):
                records.append(record)
                report.observe(record)
                if progress:
                    progress(i + 1, len(docs))
    else:
        res = PipelineResources.load(config)
        for i, doc in enumerate(docs):
            try:
                record = privatize_document(
                    str(doc["doc_id"]), doc["text"], res, doc_epsilon, config.seed
                )
            except Exception as e:  # quarantine, keep going
                report.n_failures += 1
                report.failures.append((str(doc["doc_id"]), str(e)))
                log.warning("doc %s failed: %s", doc["doc_id"], e)
                continue
            records.append(record)
            report.observe(record)
            if progress:
                progress(i + 1, len(docs))
    return records, report


def write_privatized(
    records: Sequence[PrivatizedRecord], docs: Sequence[dict], path
) -> None:
    labels_by_id = {str(d["doc_id"]): d.get("labels") for d in docs}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(_record_to_json(record, labels_by_id.get(record.doc_id)) + "\n")


def evaluate_records(
    docs: Sequence[dict],
    records: Sequence[PrivatizedRecord],
    store: EmbeddingStore,
    identifiers: dict[str, list[str]] | None = None,
) -> dict:
    """Dataset-level metric aggregates; undefined documents are excluded
    and counted."""
    docs_by_id = {str(d["doc_id"]): d for d in docs}
    retentions: list[float] = []
    cosines: list[float] = []
    pi_scores: list[float] = []
    excluded = 0
    for record in records:
        doc = docs_by_id[record.doc_id]
        pairs = [
            (key, repl)
            for (key, _e, mode), repl in zip(record.ledger, record._out_keys)
            if mode in ("none", "per_word", "pass_through")
        ]
        if pairs:
            retentions.append(metrics.chunk_retention(pairs))
        try:
            a = metrics.mean_pool(store, tokenize(doc["text"]))
            b = metrics.mean_pool(store, tokenize(record.private_text))
            cosines.append(metrics.doc_cosine(a, b))
        except metrics.MetricUndefinedError:
            excluded += 1
        if identifiers and identifiers.get(record.doc_id):
            pi_scores.append(
                metrics.pi_retention(identifiers[record.doc_id], record.private_text)
            )
    out = {
        "chunk_retention": float(np.mean(retentions)) if retentions else None,
        "cosine_similarity": float(np.mean(cosines)) if cosines else None,
        "pi_retention": float(np.mean(pi_scores)) if pi_scores else None,
        "n_excluded": excluded,
    }
    if out["cosine_similarity"] is not None and out["pi_retention"] is not None:
        out["relative_gain"] = metrics.relative_gain(
            [out["cosine_similarity"]], [1.0], [out["pi_retention"]], [1.0]
        )
    else:
        out["relative_gain"] = None
    return out


def run_experiment(
    grid: Sequence[RunConfig],
    results_path,
    identifiers: dict[str, list[str]] | None = None,
) -> list[dict]:
    """Run every config in the grid; one privatized file and one metrics row
    per config. Per-config failures are reported, not fatal."""
    if not grid:
        raise PipelineError("empty run grid")
    rows: list[dict] = []
    for config in grid:
        try:
            docs = read_dataset(config.dataset)
            records, report = privatize_dataset(config, docs=docs)
            if config.out:
                write_privatized(records, docs, config.out)
            store = load_embeddings(config.embeddings_path)
            evaluated = evaluate_records(docs, records, store, identifiers)
            avg_len = (
                config.avg_doc_length
                if config.avg_doc_length is not None
                else average_doc_length(docs)
            )
            row = {
                "dataset": config.dataset,
                "level": config.level,
                "decomposition": config.decomposition,
                "distribution": config.distribution,
                "doc_epsilon": round(
                    compute_doc_epsilon(avg_len, PRIVACY_LEVELS[config.level]), 1
                ),
                "n_docs": report.n_docs,
                "chunk_retention": evaluated["chunk_retention"],
                "cosine_similarity": evaluated["cosine_similarity"],
                "pi_retention": evaluated["pi_retention"],
                "relative_gain": evaluated["relative_gain"],
                "n_pass_through": report.n_pass_through,
                "n_per_word_fallback": report.n_per_word_fallback,
                "n_all_stopword_docs": report.n_all_stopword_docs,
            }
        except Exception as e:
            log.error("config failed (%s/%s): %s",
                      config.decomposition, config.distribution, e)
            row = {
                "dataset": config.dataset,
                "level": config.level,
                "decomposition": config.decomposition,
                "distribution": config.distribution,
                "error": str(e),
            }
        rows.append(row)
    with open(results_path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(metrics.RESULTS_COLUMNS) + "\n")
        for row in rows:
            f.write(
                "\t".join(str(row.get(c, "")) for c in metrics.RESULTS_COLUMNS) + "\n"
            )
    return rows
