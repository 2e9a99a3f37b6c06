"""advtext: a workbench for probing text classifiers with evolutionary
word-swap perturbations.

The library splits into small layers: text (tokenization, documents),
embeddings (neighbor lookup), lm (ARPA fluency scoring), classifiers
(builtin and remote scorers with budgets), attack (the genetic loop),
analytics (encodings, WMD, snapshot log, summaries), server (HTTP
session API), and bench (robustness comparisons across classifiers).
"""

__version__ = "0.1.0"

from .analytics import (
    AdversarySummary,
    CandidateRecord,
    SnapshotLog,
    TokenEncodings,
    adversary_summary,
    candidate_records,
    compute_encodings,
    improvement_pct,
    influence_encoding,
    selection_encoding,
    semantic_encoding,
    wmd,
)
from .attack import (
    Acceleration,
    AttackConfig,
    AttackResult,
    Duration,
    GenerationEvent,
    Individual,
    ScoreThreshold,
    WmdLimit,
    crossover,
    evaluate_completion,
    evolve_generation,
    fitness_of,
    mutate,
    run_attack,
    select_position,
)
from .classifiers import (
    Classifier,
    HardenedLexiconClassifier,
    LexiconClassifier,
    RemoteClassifier,
    ScoreResult,
    load_clusters,
    load_lexicon,
)
from .embeddings import (
    EmbeddingStore,
    Neighbor,
    load_antonyms,
    load_embeddings,
    load_stopwords,
    neighbors,
    similarity,
)
from .lm import NGramModel, load_arpa, normalize_candidates, position_score, word_logprob
from .text import Document, Token, apply_swap, detokenize, lock_positions, tokenize

__all__ = [
    "AdversarySummary",
    "CandidateRecord",
    "SnapshotLog",
    "TokenEncodings",
    "adversary_summary",
    "candidate_records",
    "compute_encodings",
    "improvement_pct",
    "influence_encoding",
    "selection_encoding",
    "semantic_encoding",
    "wmd",
    "Acceleration",
    "AttackConfig",
    "AttackResult",
    "Duration",
    "GenerationEvent",
    "Individual",
    "ScoreThreshold",
    "WmdLimit",
    "crossover",
    "evaluate_completion",
    "evolve_generation",
    "fitness_of",
    "mutate",
    "run_attack",
    "select_position",
    "Classifier",
    "HardenedLexiconClassifier",
    "LexiconClassifier",
    "RemoteClassifier",
    "ScoreResult",
    "load_clusters",
    "load_lexicon",
    "EmbeddingStore",
    "Neighbor",
    "load_antonyms",
    "load_embeddings",
    "load_stopwords",
    "neighbors",
    "similarity",
    "NGramModel",
    "load_arpa",
    "normalize_candidates",
    "position_score",
    "word_logprob",
    "Document",
    "Token",
    "apply_swap",
    "detokenize",
    "lock_positions",
    "tokenize",
]
