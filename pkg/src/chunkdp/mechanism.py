"""Metric-LDP embedding perturbation: embed a chunk, add noise with density
proportional to exp(-epsilon * ||z||), and project back to the nearest
vocabulary embedding.

The noise is sampled as a uniform direction on the unit sphere scaled by a
Gamma(shape=d, rate=epsilon) radius, the standard construction for the
multivariate Laplace density above.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decomposition import Chunk
from .textprep import ContractionTable, merge_contractions


class EmbeddingError(ValueError):
    pass


class MechanismError(ValueError):
    pass


@dataclass
class EmbeddingStore:
    """Vocabulary of tokens / underscore-joined n-grams with their vectors."""

    tokens: list[str]
    matrix: np.ndarray  # |V| x d
    vocab: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.vocab:
            self.vocab = {t: i for i, t in enumerate(self.tokens)}
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.tokens):
            raise EmbeddingError("matrix shape does not match vocabulary")
        if self.matrix.shape[1] < 1:
            raise EmbeddingError("embedding dimension must be >= 1")
        if not np.isfinite(self.matrix).all():
            raise EmbeddingError("non-finite embedding value")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, token: str) -> bool:
        return token in self.vocab

    def __len__(self) -> int:
        return len(self.tokens)

    def vector(self, token: str) -> np.ndarray:
        return self.matrix[self.vocab[token]]


def load_embeddings(path) -> EmbeddingStore:
    """Text word-vector format: "<V> <d>" header, then token + d reals per row."""
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}:1: expected '<V> <d>' header")
        try:
            v_count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingError(f"{path}:1: bad header {header!r}") from None
        tokens: list[str] = []
        seen: set[str] = set()
        rows = np.empty((v_count, dim), dtype=np.float64)
        lineno = 1
        for i in range(v_count):
            lineno += 1
            fields = f.readline().split()
            if len(fields) != dim + 1:
                raise EmbeddingError(
                    f"{path}:{lineno}: expected token + {dim} values"
                )
            token = fields[0]
            if token in seen:
                raise EmbeddingError(f"{path}:{lineno}: duplicate token {token!r}")
            seen.add(token)
            try:
                rows[i] = [float(x) for x in fields[1:]]
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric value") from None
            tokens.append(token)
        if f.readline().strip():
            raise EmbeddingError(f"{path}: more rows than header declares")
    if not np.isfinite(rows).all():
        raise EmbeddingError(f"{path}: non-finite embedding value")
    return EmbeddingStore(tokens=tokens, matrix=rows)


def save_embeddings(store: EmbeddingStore, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(store)} {store.dim}\n")
        for token, row in zip(store.tokens, store.matrix):
            f.write(token + " " + " ".join(repr(float(x)) for x in row) + "\n")


@dataclass(frozen=True)
class NoiseSpec:
    epsilon: float
    dim: int

    def __post_init__(self):
        if self.epsilon <= 0:
            raise MechanismError(f"epsilon must be > 0, got {self.epsilon}")


def sample_noise(spec: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    """r * v with v uniform on the unit sphere and r ~ Gamma(d, rate=epsilon)."""
    v = rng.standard_normal(spec.dim)
    v /= np.linalg.norm(v)
    r = rng.gamma(shape=spec.dim, scale=1.0 / spec.epsilon)
    return r * v


def nearest(store: EmbeddingStore, query: np.ndarray) -> str:
    """Euclidean nearest vocabulary entry; ties break lexicographically."""
    if len(store) == 0:
        raise MechanismError("empty embedding store")
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (store.dim,) or not np.isfinite(query).all():
        raise MechanismError(f"query must be a finite vector of dim {store.dim}")
    d2 = np.sum((store.matrix - query) ** 2, axis=1)
    best = d2.min()
    candidates = np.nonzero(d2 == best)[0]
    return min(store.tokens[i] for i in candidates)


class Fallback(enum.Enum):
    NONE = "none"
    PER_WORD = "per_word"
    PASS_THROUGH = "pass_through"


@dataclass
class PerturbedChunk:
    original_key: str
    replacement_key: str
    epsilon_used: float
    fallback_mode: Fallback = Fallback.NONE


def perturb_chunk(
    chunk: Chunk,
    epsilon: float,
    store: EmbeddingStore,
    rng: np.random.Generator,
    noise_fn: Callable[[NoiseSpec, np.random.Generator], np.ndarray] = sample_noise,
) -> PerturbedChunk:
    """Perturb one privatizable chunk under its budget share.

    Chunks whose underscore key is out of vocabulary fall back to perturbing
    each component word independently at epsilon/n; words that are themselves
    out of vocabulary pass through unchanged and are flagged (a privacy
    caveat the run report surfaces).
    """
    if epsilon <= 0:
        raise MechanismError(
            f"epsilon must be > 0 for privatizable chunk {chunk.key!r}"
        )
    if chunk.key in store:
        spec = NoiseSpec(epsilon=epsilon, dim=store.dim)
        noisy = store.vector(chunk.key) + noise_fn(spec, rng)
        return PerturbedChunk(
            original_key=chunk.key,
            replacement_key=nearest(store, noisy),
            epsilon_used=epsilon,
            fallback_mode=Fallback.NONE,
        )
    share = epsilon / len(chunk)
    spec = NoiseSpec(epsilon=share, dim=store.dim)
    replaced: list[str] = []
    leaked = False
    for word in chunk.tokens:
        if word in store:
            noisy = store.vector(word) + noise_fn(spec, rng)
            replaced.append(nearest(store, noisy))
        else:
            replaced.append(word)
            leaked = True
    return PerturbedChunk(
        original_key=chunk.key,
        replacement_key="_".join(replaced),
        epsilon_used=epsilon,
        fallback_mode=Fallback.PASS_THROUGH if leaked else Fallback.PER_WORD,
    )


def postprocess(chunk_keys: list[str], contractions: ContractionTable) -> str:
    """Underscores become spaces; contraction pairs recombine; single-space join."""
    tokens = [w for key in chunk_keys for w in key.split("_") if w]
    return " ".join(merge_contractions(tokens, contractions))
