import numpy as np
import pytest

WORDS = [
    "the", "hotel", "staff", "was", "friendly", "room", "clean", "we",
    "loved", "breakfast", "coffee", "service", "terrible", "slow",
    "location", "perfect", "near", "station", "price", "fair", "manager",
    "helped", "us", "quickly", "view", "amazing", "bed", "comfortable",
    "don", "t",
]

# Wordpiece vocabulary: every fixture word except "budgeting", which is
# only reachable as budget + ##ing, so alignment has to recombine pieces.
VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + WORDS
    + ["budget", "##ing", "'", ".", "!"]
)


@pytest.fixture(scope="session")
def bundle():
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast

    from neural_scorers.transformer import ModelBundle

    tokenizer = BertTokenizerFast(
        vocab={tok: i for i, tok in enumerate(VOCAB)}, do_lower_case=True
    )
    torch.manual_seed(0)
    model = BertModel(
        BertConfig(
            vocab_size=len(VOCAB),
            hidden_size=32,
            num_hidden_layers=2,
            num_attention_heads=4,
            intermediate_size=64,
            max_position_embeddings=128,
            attn_implementation="eager",
        )
    )
    return ModelBundle(model, tokenizer, max_length=128)


def make_docs(n=50, seed=77):
    """Deterministic fixture documents with punctuation, casing, a
    contraction and a word the model tokenizer must split."""
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n):
        sentences = []
        for _ in range(int(rng.integers(1, 4))):
            k = int(rng.integers(4, 9))
            words = [WORDS[j] for j in rng.integers(0, len(WORDS) - 2, k)]
            if rng.random() < 0.3:
                words.insert(int(rng.integers(0, len(words))), "budgeting")
            if rng.random() < 0.3:
                words.insert(int(rng.integers(0, len(words))), "Don't")
            sentences.append(" ".join(words).capitalize() + ".")
        docs.append({"doc_id": f"doc{i:03d}", "text": " ".join(sentences)})
    return docs


@pytest.fixture(scope="session")
def fixture_docs():
    return make_docs()


@pytest.fixture(scope="session")
def dummy_embed():
    """Deterministic text -> vector map standing in for a sentence encoder."""

    def embed(texts):
        import hashlib

        out = []
        for text in texts:
            seed = int.from_bytes(
                hashlib.sha256(text.encode()).digest()[:4], "big"
            )
            out.append(np.random.default_rng(seed).normal(size=16))
        return np.array(out)

    return embed
