import os

import numpy as np
import pytest

from chunkdp.mechanism import EmbeddingStore
from chunkdp.textprep import ContractionTable, StopwordSet

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture(scope="session")
def stopwords():
    return StopwordSet.default()


@pytest.fixture(scope="session")
def contractions():
    return ContractionTable.default()


@pytest.fixture(scope="session")
def conll_lines():
    with open(os.path.join(FIXTURES, "conll_sample.txt"), encoding="utf-8") as f:
        return f.readlines()


# Content-word vocabulary for toy embeddings and random documents; none of
# these are stopwords.
TOY_VOCAB = [
    "airport", "animal", "answer", "apple", "battery", "bottle", "bridge",
    "butter", "camera", "candle", "carpet", "castle", "cheese", "circle",
    "coffee", "corner", "cotton", "danger", "dinner", "doctor", "dragon",
    "engine", "flower", "forest", "garden", "guitar", "hammer", "harbor",
    "island", "jacket", "kitchen", "ladder", "lantern", "lemon", "london",
    "market", "mirror", "mountain", "needle", "ocean", "orange", "pencil",
    "pillow", "planet", "pocket", "rabbit", "river", "rocket", "saddle",
    "silver", "spider", "stone", "sugar", "table", "temple", "thunder",
    "tiger", "turtle", "valley", "window",
]


def make_toy_store(scale=4.0, dim=10, seed=7, extra_keys=()):
    rng = np.random.default_rng(seed)
    tokens = list(TOY_VOCAB) + list(extra_keys)
    matrix = rng.normal(size=(len(tokens), dim)) * scale
    return EmbeddingStore(tokens=tokens, matrix=matrix)


@pytest.fixture(scope="session")
def toy_store():
    return make_toy_store()
