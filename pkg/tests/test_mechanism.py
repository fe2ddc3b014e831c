import numpy as np
import pytest
import scipy.stats

from chunkdp.decomposition import Chunk
from chunkdp.mechanism import (
    EmbeddingError,
    EmbeddingStore,
    Fallback,
    MechanismError,
    NoiseSpec,
    load_embeddings,
    nearest,
    perturb_chunk,
    postprocess,
    sample_noise,
    save_embeddings,
)
from chunkdp.textprep import ContractionTable

from conftest import make_toy_store


class TestEmbeddingStore:
    def test_basic_lookup(self, toy_store):
        assert "coffee" in toy_store
        assert toy_store.vector("coffee").shape == (toy_store.dim,)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(EmbeddingError):
            EmbeddingStore(tokens=["a", "b"], matrix=np.zeros((3, 4)))

    def test_non_finite_rejected(self):
        m = np.zeros((1, 2))
        m[0, 0] = np.nan
        with pytest.raises(EmbeddingError):
            EmbeddingStore(tokens=["a"], matrix=m)

    def test_save_load_round_trip(self, tmp_path, toy_store):
        path = tmp_path / "vecs.txt"
        save_embeddings(toy_store, path)
        loaded = load_embeddings(path)
        assert loaded.tokens == toy_store.tokens
        np.testing.assert_array_equal(loaded.matrix, toy_store.matrix)

    def test_load_rejects_duplicates(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("2 2\na 1 2\na 3 4\n")
        with pytest.raises(EmbeddingError, match="duplicate"):
            load_embeddings(path)

    def test_load_rejects_row_count_mismatch(self, tmp_path):
        path = tmp_path / "vecs.txt"
        path.write_text("1 2\na 1 2\nb 3 4\n")
        with pytest.raises(EmbeddingError, match="more rows"):
            load_embeddings(path)


class TestNearest:
    def test_exact_hit(self, toy_store):
        for token in ("coffee", "window", "london"):
            assert nearest(toy_store, toy_store.vector(token)) == token

    def test_matches_batch_oracle(self, toy_store):
        # independent batch computation with the same float operations
        rng = np.random.default_rng(123)
        queries = rng.normal(size=(200, toy_store.dim)) * 5.0
        d2 = ((queries[:, None, :] - toy_store.matrix[None, :, :]) ** 2).sum(
            axis=2
        )
        expected = [toy_store.tokens[i] for i in d2.argmin(axis=1)]
        got = [nearest(toy_store, q) for q in queries]
        assert got == expected

    def test_tie_breaks_lexicographically(self):
        store = EmbeddingStore(
            tokens=["zebra", "apple", "mango"],
            matrix=np.array([[1.0, 0.0], [1.0, 0.0], [5.0, 5.0]]),
        )
        assert nearest(store, np.array([0.0, 0.0])) == "apple"

    def test_bad_query_rejected(self, toy_store):
        with pytest.raises(MechanismError):
            nearest(toy_store, np.zeros(toy_store.dim + 1))
        with pytest.raises(MechanismError):
            nearest(toy_store, np.full(toy_store.dim, np.nan))


class TestSampleNoise:
    @pytest.mark.parametrize("dim,epsilon", [(25, 1.0), (300, 0.5), (10, 10.0)])
    def test_radius_is_gamma_distributed(self, dim, epsilon):
        rng = np.random.default_rng(2024)
        spec = NoiseSpec(epsilon=epsilon, dim=dim)
        radii = np.array(
            [np.linalg.norm(sample_noise(spec, rng)) for _ in range(20_000)]
        )
        stat = scipy.stats.kstest(
            radii, scipy.stats.gamma(a=dim, scale=1.0 / epsilon).cdf
        )
        assert stat.pvalue > 0.01

    def test_direction_is_centered(self):
        # the mean vector of n centered draws concentrates near 0
        rng = np.random.default_rng(7)
        dim, epsilon, n = 25, 1.0, 20_000
        spec = NoiseSpec(epsilon=epsilon, dim=dim)
        mean = np.mean([sample_noise(spec, rng) for _ in range(n)], axis=0)
        assert np.linalg.norm(mean) < 4.0 * np.sqrt(dim / n) * (dim / epsilon)

    def test_more_budget_means_less_noise(self):
        rng = np.random.default_rng(3)
        small = np.mean(
            [np.linalg.norm(sample_noise(NoiseSpec(10.0, 10), rng)) for _ in range(2000)]
        )
        large = np.mean(
            [np.linalg.norm(sample_noise(NoiseSpec(0.1, 10), rng)) for _ in range(2000)]
        )
        assert small < large

    def test_invalid_epsilon(self):
        with pytest.raises(MechanismError):
            NoiseSpec(epsilon=0.0, dim=5)


class TestPerturbChunk:
    def test_in_vocab_single_perturbation(self, toy_store):
        calls = []

        def zero_noise(spec, rng):
            calls.append(spec)
            return np.zeros(spec.dim)

        out = perturb_chunk(
            Chunk(("coffee",)), 2.0, toy_store, np.random.default_rng(0),
            noise_fn=zero_noise,
        )
        assert out.replacement_key == "coffee"
        assert out.fallback_mode is Fallback.NONE
        assert out.epsilon_used == 2.0
        assert calls == [NoiseSpec(epsilon=2.0, dim=toy_store.dim)]

    def test_multiword_key_in_vocab(self):
        store = make_toy_store(extra_keys=("credit_card",))

        def zero_noise(spec, rng):
            return np.zeros(spec.dim)

        out = perturb_chunk(
            Chunk(("credit", "card")), 1.0, store, np.random.default_rng(0),
            noise_fn=zero_noise,
        )
        assert out.replacement_key == "credit_card"
        assert out.fallback_mode is Fallback.NONE

    def test_oov_key_per_word_at_split_budget(self, toy_store):
        specs = []

        def zero_noise(spec, rng):
            specs.append(spec)
            return np.zeros(spec.dim)

        out = perturb_chunk(
            Chunk(("coffee", "sugar")), 3.0, toy_store,
            np.random.default_rng(0), noise_fn=zero_noise,
        )
        assert out.replacement_key == "coffee_sugar"
        assert out.fallback_mode is Fallback.PER_WORD
        assert out.epsilon_used == 3.0
        assert [s.epsilon for s in specs] == [1.5, 1.5]

    def test_oov_word_passes_through_and_is_flagged(self, toy_store):
        def zero_noise(spec, rng):
            return np.zeros(spec.dim)

        out = perturb_chunk(
            Chunk(("coffee", "zzz")), 3.0, toy_store,
            np.random.default_rng(0), noise_fn=zero_noise,
        )
        assert out.replacement_key == "coffee_zzz"
        assert out.fallback_mode is Fallback.PASS_THROUGH

    def test_zero_epsilon_rejected(self, toy_store):
        with pytest.raises(MechanismError):
            perturb_chunk(
                Chunk(("coffee",)), 0.0, toy_store, np.random.default_rng(0)
            )

    def test_high_budget_mostly_self_maps(self, toy_store):
        rng = np.random.default_rng(11)
        hits = sum(
            perturb_chunk(Chunk(("coffee",)), 100.0, toy_store, rng).replacement_key
            == "coffee"
            for _ in range(200)
        )
        assert hits > 180

    def test_low_budget_rarely_self_maps(self, toy_store):
        rng = np.random.default_rng(11)
        hits = sum(
            perturb_chunk(Chunk(("coffee",)), 0.05, toy_store, rng).replacement_key
            == "coffee"
            for _ in range(200)
        )
        assert hits < 40


class TestPostprocess:
    def test_underscores_and_contractions(self):
        table = ContractionTable({("don", "t"): "don't"})
        assert postprocess(["don", "t_like", "credit_card"], table) == (
            "don't like credit card"
        )

    def test_empty(self):
        assert postprocess([], ContractionTable()) == ""
