"""Similarity-weighted smoothing for sparse noun-verb pair counts.

Builds maximum-likelihood and Good-Turing back-off models over
(noun, verb) pair counts, measures distributional similarity between
nouns, combines similar-noun evidence into estimates for unseen pairs,
and evaluates the whole stack with a pseudo-word disambiguation harness.
"""

__version__ = "0.1.0"

from .basemodel import KatzModel, MleModel, good_turing_adjusted_count
from .corpus import (
    PairCorpus,
    SplitSpec,
    Vocabulary,
    load_pairs,
    load_snapshot,
    make_folds,
    parse_pairs,
    save_snapshot,
    split_unseen_test,
    strip_singletons,
)
from .estimator import SimEstimator
from .evaluation import (
    BASE_MODELS,
    METHODS,
    FoldReport,
    PseudoWordMap,
    TrialOutcome,
    build_bundles,
    build_pseudowords,
    cross_validate,
    error_rate,
    evaluate_grid,
    make_scorer,
    paired_difference,
    run_trial,
)
from .similarity import (
    Neighborhood,
    ProfileBuilder,
    SimilarityProfile,
    SparseDistribution,
    WeightConfig,
    build_profile,
    confusion_probability,
    count_touches,
    kl_divergence,
    l1_distance,
    total_divergence_to_average,
    weight,
)
from .synthetic import BlockSpec, block_corpus, demo_corpus, zipf_variant

__all__ = [name for name in dir() if not name.startswith("_")]
