"""Command-line entry point.

Subcommands: extract-ngrams, score, chunk, privatize, evaluate, analyze.
A config file of "key = value" lines can pre-populate any flag of the
privatize subcommand; explicit flags win over file values.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import association, ngrams, pipeline, stats
from .decomposition import ChunkLexicon, greedy_chunk, pos_chunk
from .mechanism import load_embeddings
from .textprep import StopwordSet, tokenize

log = logging.getLogger("chunkdp")

USAGE_ERROR = 1
DATA_ERROR = 2


def _parse_config_file(path) -> dict[str, str]:
    """key = value lines; '#' starts a comment; values are bare strings."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip().strip('"')
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chunkdp",
        description="Document-level DP text obfuscation via chunk "
        "decomposition and budget distribution.",
    )
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-ngrams", help="count n-grams from a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--nmax", type=int, default=4)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("score", help="association measures over n-gram tables")
    p.add_argument("--measure", required=True, choices=association.MEASURES)
    p.add_argument("--tables", required=True, help="directory of ngrams.<n>.tsv")
    p.add_argument("--n", type=int, required=True, choices=(2, 3, 4))
    p.add_argument("--out", required=True)
    p.add_argument("--min-count", type=int, default=association.PMI_MIN_COUNT)
    p.add_argument("--pmi-threshold", type=float, default=association.PMI_THRESHOLD)
    p.add_argument("--top-percent", type=float, default=association.TOP_PERCENT)

    p = sub.add_parser("chunk", help="decompose documents into chunks")
    p.add_argument("--method", required=True, choices=pipeline.DECOMPOSITION_METHODS)
    p.add_argument("--lexicon", action="append", default=[],
                   help="score file (repeatable) or multiword lemma file")
    p.add_argument("--tagger", help="CoNLL-2000 training file for pos method")
    p.add_argument("--input", required=True, help="JSONL dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--keep-boundary-stopwords", action="store_true")

    p = sub.add_parser("privatize", help="run the DP obfuscation pipeline")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--dataset")
    p.add_argument("--decomposition", choices=pipeline.DECOMPOSITION_METHODS)
    p.add_argument("--distribution", choices=pipeline.DISTRIBUTION_METHODS)
    p.add_argument("--level", choices=tuple(pipeline.PRIVACY_LEVELS))
    p.add_argument("--out")
    p.add_argument("--embeddings")
    p.add_argument("--lexicon", action="append", default=[])
    p.add_argument("--lemma-file")
    p.add_argument("--tagger")
    p.add_argument("--unigram-table")
    p.add_argument("--ic-table")
    p.add_argument("--score-file")
    p.add_argument("--invert", choices=("true", "false"))
    p.add_argument("--avg-doc-length", type=float)
    p.add_argument("--keep-boundary-stopwords", action="store_true")

    p = sub.add_parser("evaluate", help="metrics over an original/private pair")
    p.add_argument("--orig", required=True)
    p.add_argument("--priv", required=True)
    p.add_argument("--identifiers")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="ANOVA / Tukey HSD over a results table")
    p.add_argument("--results", required=True)
    p.add_argument("--value", default="relative_gain")
    p.add_argument("--anova", action="store_true")
    p.add_argument("--tukey", action="store_true")
    p.add_argument("--normalize", action="store_true")
    return parser


def _cmd_extract_ngrams(args) -> int:
    import os

    with open(args.input, encoding="utf-8") as f:
        tables = ngrams.extract_ngrams(f, n_max=args.nmax, min_count=args.min_count)
    os.makedirs(args.out_dir, exist_ok=True)
    for table in tables:
        ngrams.save_table(table, os.path.join(args.out_dir, f"ngrams.{table.n}.tsv"))
    log.info("wrote %d tables to %s", len(tables), args.out_dir)
    return 0


def _cmd_score(args) -> int:
    import os

    tables = {}
    for n in range(1, args.n + 1):
        path = os.path.join(args.tables, f"ngrams.{n}.tsv")
        if os.path.exists(path):
            tables[n] = ngrams.load_table(path)
    raw = association.score_all(args.measure, args.n, tables)
    if args.measure == "pmi":
        scoreset = association.filter_pmi(
            raw, tables, min_count=args.min_count, threshold=args.pmi_threshold
        )
    else:
        scoreset = association.filter_top_percent(
            raw, args.measure, percent=args.top_percent
        )
    association.save_scores(scoreset, args.out)
    log.info("kept %d of %d %s scores", len(scoreset.scores), len(raw), args.measure)
    return 0


def _cmd_chunk(args) -> int:
    from .decomposition import train_chunk_tagger, train_pos_tagger
    from .textprep import split_sentences

    stopwords = StopwordSet.default()
    strip = not args.keep_boundary_stopwords
    if args.method == "pos":
        if not args.tagger:
            raise ValueError("--tagger is required for the pos method")
        with open(args.tagger, encoding="utf-8") as f:
            lines = f.readlines()
        chunk_tagger = train_chunk_tagger(lines)
        pos_tagger = train_pos_tagger(lines)

        def decompose(tokens):
            return pos_chunk(
                tokens, pos_tagger.tag(tokens), chunk_tagger, stopwords, strip
            ).chunks

    else:
        if not args.lexicon:
            raise ValueError("--lexicon is required for lexicon-based methods")
        if args.method == "lexicon":
            lexicon = ChunkLexicon.from_lemma_file(args.lexicon[0])
        else:
            lexicon = ChunkLexicon.from_score_sets(
                association.load_scores(p) for p in args.lexicon
            )

        def decompose(tokens):
            return greedy_chunk(tokens, lexicon, stopwords, strip).chunks

    docs = pipeline.read_dataset(args.input)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            chunks = []
            for sentence in split_sentences(doc["text"]):
                chunks.extend(decompose(tokenize(sentence)))
            f.write(
                json.dumps(
                    {
                        "doc_id": doc["doc_id"],
                        "chunks": [
                            {"key": c.key, "privatize": c.privatize} for c in chunks
                        ],
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    return 0


def _config_from_args(args) -> pipeline.RunConfig:
    file_values = _parse_config_file(args.config) if args.config else {}

    def pick(flag_value, key, cast=str):
        if flag_value not in (None, [], False):
            return flag_value
        if key in file_values:
            return cast(file_values[key])
        return flag_value

    dataset = pick(args.dataset, "dataset")
    decomposition = pick(args.decomposition, "decomposition")
    distribution = pick(args.distribution, "distribution")
    level = pick(args.level, "level")
    if not all([dataset, decomposition, distribution, level]):
        raise argparse.ArgumentTypeError(
            "dataset, decomposition, distribution and level are required "
            "(via flags or --config)"
        )
    invert = pick(args.invert, "invert")
    lexicon = args.lexicon or [
        p for p in file_values.get("lexicon", "").split(",") if p
    ]
    return pipeline.RunConfig(
        dataset=dataset,
        decomposition=decomposition,
        distribution=distribution,
        level=level,
        seed=args.seed,
        workers=args.workers,
        out=pick(args.out, "out"),
        embeddings_path=pick(args.embeddings, "embeddings"),
        lexicon_paths=tuple(lexicon),
        lemma_path=pick(args.lemma_file, "lemma_file"),
        conll_path=pick(args.tagger, "tagger"),
        unigram_table_path=pick(args.unigram_table, "unigram_table"),
        ic_table_path=pick(args.ic_table, "ic_table"),
        score_file_path=pick(args.score_file, "score_file"),
        invert=None if invert is None else invert == "true",
        strip_boundary_stopwords=not pick(
            args.keep_boundary_stopwords, "keep_boundary_stopwords",
            cast=lambda v: v == "true",
        ),
        avg_doc_length=pick(args.avg_doc_length, "avg_doc_length", cast=float),
    )


def _cmd_privatize(args) -> int:
    config = _config_from_args(args)
    docs = pipeline.read_dataset(config.dataset)
    records, report = pipeline.privatize_dataset(config, docs=docs)
    if config.out:
        pipeline.write_privatized(records, docs, config.out)
    log.info(
        "done: %d docs (%d all-stopword, %d pass-through tokens, "
        "%d per-word fallbacks, %d zero-budget chunks, %d failures)",
        report.n_docs, report.n_all_stopword_docs, report.n_pass_through,
        report.n_per_word_fallback, report.n_zero_budget, report.n_failures,
    )
    return 0


def _load_identifiers(path) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out[str(rec["doc_id"])] = list(rec["identifiers"])
    return out


def _cmd_evaluate(args) -> int:
    docs = pipeline.read_dataset(args.orig)
    priv = pipeline.read_dataset(args.priv)
    store = load_embeddings(args.embeddings)
    identifiers = _load_identifiers(args.identifiers) if args.identifiers else None
    records = []
    for p in priv:
        rec = pipeline.PrivatizedRecord(
            doc_id=str(p["doc_id"]),
            private_text=p["text"],
            ledger=[tuple(entry) for entry in p.get("ledger", [])],
            doc_epsilon=p.get("doc_epsilon", 0.0),
            all_stopwords=p.get("all_stopwords", False),
        )
        rec._out_keys = [k for k, _e, _m in rec.ledger]
        records.append(rec)
    # Replacement keys are not stored in the privatized file, so chunk
    # retention is recomputed from texts instead of ledgers here.
    evaluated = pipeline.evaluate_records(docs, records, store, identifiers)
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(evaluated, sort_keys=True) + "\n")
    log.info("metrics: %s", evaluated)
    return 0


def _cmd_analyze(args) -> int:
    rows = []
    with open(args.results, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        for line in f:
            line = line.rstrip("\n")
            if line:
                rows.append(dict(zip(header, line.split("\t"))))
    rows = [r for r in rows if r.get(args.value) not in ("", "None", None)]
    if args.normalize:
        rows = stats.group_normalize(rows, by=("dataset", "level"), value_key=args.value)
    if args.anova:
        result = stats.anova(
            rows,
            factors=("decomposition", "distribution", "dataset", "level"),
            value_key=args.value,
            interaction=("decomposition", "distribution"),
        )
        for name, fr in result.factors.items():
            print(
                f"{name}\tsum_sq={fr.sum_sq:.4f}\tdf={fr.df}\t"
                f"F={fr.f_value:.2f}\tp={fr.p_value:.3g}\t"
                f"partial_eta_sq={fr.partial_eta_sq:.3f}"
            )
        print(f"residual\tsum_sq={result.residual_sum_sq:.4f}\tdf={result.residual_df}")
    if args.tukey:
        groups: dict[str, list[float]] = {}
        for r in rows:
            label = f"{r['decomposition']}+{r['distribution']}"
            groups.setdefault(label, []).append(float(r[args.value]))
        for pair in stats.tukey_hsd(groups):
            print(
                f"{pair.group_a} vs {pair.group_b}\tdiff={pair.mean_diff:.4f}\t"
                f"q={pair.q_statistic:.3f}\tp={pair.p_adjusted:.4f}\t"
                f"{'*' if pair.significant else ''}"
            )
    return 0


_COMMANDS = {
    "extract-ngrams": _cmd_extract_ngrams,
    "score": _cmd_score,
    "chunk": _cmd_chunk,
    "privatize": _cmd_privatize,
    "evaluate": _cmd_evaluate,
    "analyze": _cmd_analyze,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else USAGE_ERROR
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )
    log.info("command=%s seed=%d workers=%d", args.command, args.seed, args.workers)
    try:
        return _COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as e:
        log.error("%s", e)
        return USAGE_ERROR
    except (ValueError, KeyError, OSError) as e:
        log.error("%s", e)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
