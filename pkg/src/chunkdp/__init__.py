"""chunkdp: document-level differentially private text obfuscation via
chunk decomposition and privacy budget distribution."""

from .textprep import (
    StopwordSet,
    ContractionTable,
    tokenize,
    split_sentences,
    merge_contractions,
)
from .ngrams import NgramTable, extract_ngrams, save_table, load_table, frequency
from .association import (
    AssocScoreSet,
    pmi,
    llr,
    t_score,
    score_all,
    filter_pmi,
    filter_top_percent,
)
from .decomposition import (
    Chunk,
    ChunkedDocument,
    ChunkLexicon,
    ChunkTaggerModel,
    greedy_chunk,
    lexicon_chunk,
    pos_chunk,
    process_stopwords,
    train_chunk_tagger,
    train_pos_tagger,
)
from .budgeting import (
    BudgetAllocation,
    ScoreFile,
    convert_scores,
    chunk_budgets,
    uniform_scores,
    ic_table_scores,
    corpus_ic_scores,
    external_scores,
)
from .mechanism import (
    EmbeddingStore,
    NoiseSpec,
    PerturbedChunk,
    Fallback,
    load_embeddings,
    save_embeddings,
    sample_noise,
    nearest,
    perturb_chunk,
    postprocess,
)
from .metrics import pi_retention, mean_pool, doc_cosine, relative_gain
from .stats import AnovaResult, anova, group_normalize, tukey_hsd
from .pipeline import (
    PRIVACY_LEVELS,
    RunConfig,
    PipelineResources,
    PrivatizedRecord,
    compute_doc_epsilon,
    privatize_document,
    privatize_dataset,
    run_experiment,
)

__version__ = "0.1.0"
