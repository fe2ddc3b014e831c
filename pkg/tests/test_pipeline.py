import json
import os

import numpy as np
import pytest

from chunkdp.association import AssocScoreSet, save_scores
from chunkdp.mechanism import load_embeddings, save_embeddings
from chunkdp.ngrams import NgramTable, save_table
from chunkdp.pipeline import (
    DEFAULT_INVERT,
    PRIVACY_LEVELS,
    PipelineError,
    PipelineResources,
    RunConfig,
    _doc_rng,
    average_doc_length,
    compute_doc_epsilon,
    evaluate_records,
    privatize_dataset,
    privatize_document,
    read_dataset,
    run_experiment,
    write_privatized,
)

from conftest import TOY_VOCAB, make_toy_store

DOCS = [
    {
        "doc_id": "d1",
        "text": "The coffee sugar was great. We saw the london market!",
        "labels": {"y": 1},
    },
    {
        "doc_id": "d2",
        "text": "My camera and jacket stayed in the kitchen drawer.",
        "labels": {"y": 0},
    },
    {"doc_id": "d3", "text": "Of the and but.", "labels": {"y": 0}},
    {"doc_id": "d4", "text": "Rocket engine thunder!", "labels": {"y": 1}},
]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipeline")
    store = make_toy_store(extra_keys=("coffee_sugar", "london_market"))
    save_embeddings(store, root / "vectors.txt")

    with open(root / "docs.jsonl", "w") as f:
        for doc in DOCS:
            f.write(json.dumps(doc) + "\n")

    save_scores(
        AssocScoreSet("pmi", 2, {"coffee sugar": 5.0, "london market": 4.5}),
        root / "pmi.2.tsv",
    )

    counts = {w: 10 * (i + 1) for i, w in enumerate(TOY_VOCAB)}
    counts.update({"the": 5000, "was": 2000, "we": 1500})
    save_table(
        NgramTable(n=1, counts=counts, total_unigrams=100_000),
        root / "ngrams.1.tsv",
    )

    with open(root / "ic.tsv", "w") as f:
        for i, w in enumerate(TOY_VOCAB):
            f.write(f"{w}\t{2.0 + (i % 7)}\n")

    from chunkdp.textprep import tokenize

    with open(root / "external.jsonl", "w") as f:
        for doc in DOCS:
            tokens = tokenize(doc["text"])
            rec = {
                "doc_id": doc["doc_id"],
                "invert": True,
                "scores": [[t, float(len(t))] for t in tokens],
            }
            f.write(json.dumps(rec) + "\n")

    conll_src = os.path.join(os.path.dirname(__file__), "fixtures", "conll_sample.txt")
    return {
        "root": root,
        "store": store,
        "dataset": str(root / "docs.jsonl"),
        "embeddings": str(root / "vectors.txt"),
        "pmi_scores": str(root / "pmi.2.tsv"),
        "unigram_table": str(root / "ngrams.1.tsv"),
        "ic_table": str(root / "ic.tsv"),
        "score_file": str(root / "external.jsonl"),
        "conll": conll_src,
    }


def base_config(ws, **overrides):
    kwargs = dict(
        dataset=ws["dataset"],
        decomposition="pmi",
        distribution="uniform",
        level="medium",
        embeddings_path=ws["embeddings"],
        lexicon_paths=(ws["pmi_scores"],),
        seed=42,
    )
    kwargs.update(overrides)
    return RunConfig(**kwargs)


class TestDocEpsilon:
    def test_level_arithmetic(self):
        assert compute_doc_epsilon(52.0, PRIVACY_LEVELS["high"]) == pytest.approx(5.2)
        assert compute_doc_epsilon(52.0, PRIVACY_LEVELS["medium"]) == pytest.approx(52.0)
        assert compute_doc_epsilon(187.0, PRIVACY_LEVELS["low"]) == pytest.approx(935.0)

    def test_invalid_inputs(self):
        with pytest.raises(PipelineError):
            compute_doc_epsilon(0.0, 1.0)
        with pytest.raises(PipelineError):
            compute_doc_epsilon(10.0, 0.0)


class TestRunConfig:
    def test_validate_catches_missing_resources(self, workspace):
        with pytest.raises(PipelineError, match="lexicon_paths"):
            base_config(workspace, lexicon_paths=()).validate()
        with pytest.raises(PipelineError, match="conll"):
            base_config(workspace, decomposition="pos").validate()
        with pytest.raises(PipelineError, match="ic_table"):
            base_config(workspace, distribution="ic_table").validate()
        with pytest.raises(PipelineError, match="unknown"):
            base_config(workspace, level="extreme").validate()

    def test_default_invert_per_distribution(self, workspace):
        assert DEFAULT_INVERT == {
            "uniform": False,
            "ic_table": True,
            "corpus_ic": True,
        }
        res = PipelineResources.load(base_config(workspace))
        assert res.invert is False
        res = PipelineResources.load(
            base_config(
                workspace,
                distribution="corpus_ic",
                unigram_table_path=workspace["unigram_table"],
            )
        )
        assert res.invert is True

    def test_invert_override(self, workspace):
        res = PipelineResources.load(base_config(workspace, invert=True))
        assert res.invert is True


class TestPrivatizeDocument:
    def _res(self, workspace, **overrides):
        return PipelineResources.load(base_config(workspace, **overrides))

    def test_budget_composition_invariant(self, workspace):
        res = self._res(workspace)
        record = privatize_document("d1", DOCS[0]["text"], res, 30.0, seed=42)
        assert not record.all_stopwords
        spent = sum(eps for _k, eps, _m in record.ledger)
        assert spent == pytest.approx(30.0, rel=1e-9)
        assert record.doc_epsilon == 30.0

    def test_stopword_chunks_get_zero_budget(self, workspace):
        res = self._res(workspace)
        record = privatize_document("d1", DOCS[0]["text"], res, 30.0, seed=42)
        for key, eps, mode in record.ledger:
            if mode == "stopword":
                assert eps == 0.0

    def test_ledger_covers_all_chunks_in_order(self, workspace):
        res = self._res(workspace)
        record = privatize_document("d1", DOCS[0]["text"], res, 30.0, seed=42)
        keys = [k for k, _e, _m in record.ledger]
        assert keys[0] == "the"
        assert "coffee_sugar" in keys
        assert "london_market" in keys

    def test_all_stopword_document_passes_through(self, workspace):
        res = self._res(workspace)
        record = privatize_document("d3", DOCS[2]["text"], res, 10.0, seed=42)
        assert record.all_stopwords
        assert record.private_text == "of the and but"
        assert all(mode in ("stopword", "zero_budget") for _k, _e, mode in record.ledger)

    def test_empty_document(self, workspace):
        res = self._res(workspace)
        record = privatize_document("dx", "...", res, 10.0, seed=42)
        assert record.private_text == ""
        assert record.ledger == []

    def test_oov_word_flagged_as_pass_through(self, workspace):
        res = self._res(workspace)
        # "drawer" and "stayed" are not in the toy vocabulary
        record = privatize_document("d2", DOCS[1]["text"], res, 50.0, seed=42)
        modes = {m for _k, _e, m in record.ledger}
        assert "pass_through" in modes

    def test_same_seed_reproduces_exactly(self, workspace):
        res = self._res(workspace)
        a = privatize_document("d1", DOCS[0]["text"], res, 5.0, seed=7)
        b = privatize_document("d1", DOCS[0]["text"], res, 5.0, seed=7)
        assert a == b

    def test_stream_depends_on_doc_id_and_seed(self):
        base = _doc_rng(42, "d1").random(4).tolist()
        assert _doc_rng(42, "d1").random(4).tolist() == base
        assert _doc_rng(42, "d2").random(4).tolist() != base
        assert _doc_rng(43, "d1").random(4).tolist() != base

    def test_external_scores_use_record_invert(self, workspace):
        res = self._res(workspace, distribution="external",
                        score_file_path=workspace["score_file"])
        record = privatize_document("d4", DOCS[3]["text"], res, 12.0, seed=42)
        spent = sum(eps for _k, eps, _m in record.ledger)
        assert spent == pytest.approx(12.0, rel=1e-9)
        # invert=true in the file: shortest word gets the largest share
        eps_by_key = {k: e for k, e, _m in record.ledger}
        assert eps_by_key["engine"] < eps_by_key["rocket"] or (
            eps_by_key["engine"] == eps_by_key["rocket"]
        )


class TestPrivatizeDataset:
    def test_serial_run_and_report(self, workspace):
        records, report = privatize_dataset(base_config(workspace))
        assert [r.doc_id for r in records] == ["d1", "d2", "d3", "d4"]
        assert report.n_docs == 4
        assert report.n_all_stopword_docs == 1
        assert report.n_failures == 0

    def test_shared_doc_epsilon_from_average_length(self, workspace):
        docs = read_dataset(workspace["dataset"])
        avg = average_doc_length(docs)
        records, _ = privatize_dataset(base_config(workspace, level="high"))
        expected = compute_doc_epsilon(avg, 0.1)
        assert all(r.doc_epsilon == pytest.approx(expected) for r in records)

    def test_failures_are_quarantined(self, workspace):
        # external scores missing for one doc -> that doc is skipped, not fatal
        partial = workspace["root"] / "partial.jsonl"
        with open(workspace["score_file"]) as f:
            lines = [l for l in f if '"d3"' not in l]
        partial.write_text("".join(lines))
        config = base_config(
            workspace, distribution="external", score_file_path=str(partial)
        )
        records, report = privatize_dataset(config)
        assert report.n_failures == 1
        assert report.failures[0][0] == "d3"
        assert [r.doc_id for r in records] == ["d1", "d2", "d4"]

    def test_worker_count_does_not_change_output(self, workspace, tmp_path):
        docs = read_dataset(workspace["dataset"])
        paths = []
        for i, workers in enumerate((1, 2)):
            config = base_config(workspace, workers=workers, level="high")
            records, _ = privatize_dataset(config, docs=docs)
            out = tmp_path / f"out{i}.jsonl"
            write_privatized(records, docs, out)
            paths.append(out)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_output_independent_of_doc_order(self, workspace):
        docs = read_dataset(workspace["dataset"])
        config = base_config(workspace, level="high")
        forward, _ = privatize_dataset(config, docs=docs)
        backward, _ = privatize_dataset(config, docs=list(reversed(docs)))
        by_id = {r.doc_id: r for r in backward}
        for record in forward:
            assert by_id[record.doc_id] == record


class TestEvaluateAndExperiment:
    def test_evaluate_records_keys(self, workspace):
        docs = read_dataset(workspace["dataset"])
        records, _ = privatize_dataset(base_config(workspace))
        out = evaluate_records(
            docs, records, workspace["store"],
            identifiers={"d1": ["london market"], "d4": ["rocket"]},
        )
        for key in ("chunk_retention", "cosine_similarity", "pi_retention",
                    "relative_gain", "n_excluded"):
            assert key in out
        assert 0.0 <= out["chunk_retention"] <= 1.0
        assert -1.0 <= out["cosine_similarity"] <= 1.0
        assert 0.0 <= out["pi_retention"] <= 1.0

    def test_high_budget_keeps_text_close(self, workspace):
        docs = read_dataset(workspace["dataset"])
        config = base_config(workspace, avg_doc_length=200.0, level="low")
        records, _ = privatize_dataset(config, docs=docs)
        out = evaluate_records(docs, records, workspace["store"])
        assert out["chunk_retention"] > 0.8
        assert out["cosine_similarity"] > 0.95

    def test_run_experiment_writes_results_table(self, workspace, tmp_path):
        grid = [
            base_config(workspace, level="medium"),
            base_config(workspace, level="low"),
        ]
        results = tmp_path / "results.tsv"
        rows = run_experiment(grid, results)
        assert len(rows) == 2
        lines = results.read_text().splitlines()
        header = lines[0].split("\t")
        from chunkdp.metrics import RESULTS_COLUMNS

        assert header == list(RESULTS_COLUMNS)
        assert len(lines) == 3

    def test_run_experiment_reports_config_errors(self, workspace, tmp_path):
        bad = base_config(workspace, dataset=str(tmp_path / "missing.jsonl"))
        rows = run_experiment([bad], tmp_path / "results.tsv")
        assert "error" in rows[0]
