"""Compositionality scoring for two-word noun phrases.

Blends distributional similarity from dense word vectors with hypernymy
similarity from Poincare-ball embeddings trained on pattern-extracted
hyponym-hypernym pairs.
"""

from .datasets import CompoundEntry, load_dataset
from .dense import DenseEmbedding, UncoveredError, cosine, load_dense, score_d
from .extraction import (
    NounPhrase,
    PairOccurrence,
    TaggedSentence,
    chunk_noun_phrases,
    extract_lines,
    match_patterns,
    parse_sentence,
)
from .hyperbolic import (
    PoincareEmbedding,
    PoincareModel,
    poincare_distance,
    poincare_similarity,
    project,
)
from .ranking import RankedPairList, WeightedPair, aggregate, build_training_list, drop_top_percent, normalize
from .regression import (
    KernelRidgeRegressor,
    KNNRegressor,
    PLSRegressor,
    SplitPlan,
    build_feature_matrix,
    mixed_score,
    run_protocol,
)
from .scoring import CompositionalityScorer, ScoredEntry, fallback_scale, hypernym_sets
from .stats import abs_rho, spearman, wilcoxon_signed_rank, z_test

__version__ = "0.1.0"

__all__ = [
    "CompoundEntry",
    "load_dataset",
    "DenseEmbedding",
    "UncoveredError",
    "cosine",
    "load_dense",
    "score_d",
    "NounPhrase",
    "PairOccurrence",
    "TaggedSentence",
    "chunk_noun_phrases",
    "extract_lines",
    "match_patterns",
    "parse_sentence",
    "PoincareEmbedding",
    "PoincareModel",
    "poincare_distance",
    "poincare_similarity",
    "project",
    "RankedPairList",
    "WeightedPair",
    "aggregate",
    "build_training_list",
    "drop_top_percent",
    "normalize",
    "KernelRidgeRegressor",
    "KNNRegressor",
    "PLSRegressor",
    "SplitPlan",
    "build_feature_matrix",
    "mixed_score",
    "run_protocol",
    "CompositionalityScorer",
    "ScoredEntry",
    "fallback_scale",
    "hypernym_sets",
    "abs_rho",
    "spearman",
    "wilcoxon_signed_rank",
    "z_test",
    "__version__",
]
