"""score-neural: batch word-importance scoring over a JSONL dataset.

Reads {"doc_id", "text", ...} lines and writes one score record per
document in the score-file format the privatization pipeline consumes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .keyword import keybert_scores, sentence_transformer_embedder, yake_scores
from .records import METHODS, write_score_file

log = logging.getLogger("neural_scorers")

DEFAULT_ENCODER = "bert-base-uncased"
DEFAULT_SENTENCE_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


def read_dataset(path) -> list[dict]:
    docs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if "doc_id" not in rec or "text" not in rec:
                raise ValueError(f"{path}:{lineno}: missing doc_id/text")
            docs.append(rec)
    return docs


def build_scorer(method: str, model: str | None):
    if method == "yake":
        return lambda text, doc_id: yake_scores(text, doc_id)
    if method == "keybert":
        embed = sentence_transformer_embedder(model or DEFAULT_SENTENCE_MODEL)
        return lambda text, doc_id: keybert_scores(text, embed, doc_id)
    from .transformer import ModelBundle, attention_scores, ig_scores

    bundle = ModelBundle.from_pretrained(model or DEFAULT_ENCODER)
    fn = attention_scores if method == "attention" else ig_scores
    return lambda text, doc_id: fn(text, bundle, doc_id)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="score-neural",
        description="Word-importance scoring for budget distribution.",
    )
    parser.add_argument("--method", required=True, choices=METHODS)
    parser.add_argument("--dataset", required=True, help="JSONL documents")
    parser.add_argument("--out", required=True, help="JSONL score file")
    parser.add_argument("--model", help="model name or local path")
    parser.add_argument("--log-level", default="INFO")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        docs = read_dataset(args.dataset)
        scorer = build_scorer(args.method, args.model)
        records = [scorer(doc["text"], str(doc["doc_id"])) for doc in docs]
        write_score_file(records, args.out)
    except (OSError, ValueError, KeyError) as e:
        log.error("%s", e)
        return 2
    log.info("scored %d documents with %s -> %s", len(records), args.method, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
