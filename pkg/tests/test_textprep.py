import re

from hypothesis import given, strategies as st

from chunkdp.textprep import (
    ContractionTable,
    merge_contractions,
    split_sentences,
    tokenize,
)


class TestTokenize:
    def test_contraction_splits(self):
        assert tokenize("Didn't have to stay") == ["didn", "t", "have", "to", "stay"]

    def test_empty(self):
        assert tokenize("") == []

    def test_punctuation_separates(self):
        assert tokenize("Great website, products!") == ["great", "website", "products"]

    def test_idempotent_on_single_tokens(self):
        for token in ("word", "x1", "under_score"):
            assert tokenize(token) == [token]

    @given(st.text(max_size=200))
    def test_tokens_are_word_runs(self, s):
        for token in tokenize(s):
            assert re.fullmatch(r"\w+", token)

    @given(st.text(max_size=200))
    def test_order_matches_source_spans(self, s):
        spans = [m.group(0).lower() for m in re.finditer(r"\b\w+\b", s)]
        assert tokenize(s) == spans


class TestSplitSentences:
    def test_terminal_marks(self):
        assert split_sentences("A. B!") == ["A.", "B!"]

    def test_no_punctuation(self):
        assert split_sentences("no punctuation") == ["no punctuation"]

    def test_abbreviation_splits_too(self):
        # rule-based splitter: no abbreviation list, so "Mr." ends a sentence
        assert split_sentences("Mr. Smith left.") == ["Mr.", "Smith left."]

    @given(st.text(max_size=300))
    def test_join_preserves_tokens(self, s):
        assert tokenize(" ".join(split_sentences(s))) == tokenize(s)


class TestMergeContractions:
    def _table(self):
        return ContractionTable({("don", "t"): "don't", ("it", "s"): "it's"})

    def test_basic_merge(self):
        assert merge_contractions(["don", "t", "go"], self._table()) == ["don't", "go"]

    def test_empty(self):
        assert merge_contractions([], self._table()) == []

    def test_order_matters(self):
        assert merge_contractions(["t", "don"], self._table()) == ["t", "don"]

    def test_no_remerge_of_output(self):
        # each merge consumes both tokens; output is not re-scanned
        out = merge_contractions(["don", "t", "s"], self._table())
        assert out == ["don't", "s"]

    @given(st.lists(st.sampled_from(["don", "t", "it", "s", "x", "y"]), max_size=20))
    def test_length_reduces_by_merge_count(self, tokens):
        out = merge_contractions(tokens, self._table())
        merges = sum("'" in t for t in out) - sum("'" in t for t in tokens)
        assert len(tokens) - len(out) == merges

    def test_default_table_values_have_one_apostrophe(self):
        table = ContractionTable.default()
        for (a, b), merged in table.pairs.items():
            assert a == a.lower() and b == b.lower()
            assert merged.count("'") == 1
