"""Word-importance scorers (attention, integrated gradients, embedding and
statistical keyword extraction) emitting score files for DP budget
distribution."""

from .align import align_token_scores
from .keyword import keybert_scores, sentence_transformer_embedder, yake_scores
from .records import (
    DEFAULT_INVERT,
    METHODS,
    ScoreRecord,
    read_score_file,
    tokenize,
    write_score_file,
)

__all__ = [
    "DEFAULT_INVERT",
    "METHODS",
    "ScoreRecord",
    "align_token_scores",
    "keybert_scores",
    "read_score_file",
    "sentence_transformer_embedder",
    "tokenize",
    "write_score_file",
    "yake_scores",
]

__version__ = "0.1.0"
