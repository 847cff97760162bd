"""Ultradense: orthogonal embedding transformations that concentrate
lexical information (sentiment, concreteness, frequency, ...) in tiny
subspaces, plus lexicon induction and rank-correlation evaluation."""

from .embeddings import (
    EmbeddingSet,
    load_embeddings,
    normalize_embeddings,
    save_embeddings,
    top_k_filter,
    transform_embeddings,
)
from .evaluation import (
    EvalReport,
    evaluate,
    fisher_z_compare,
    kendall_tau,
    pca_subspace,
    random_subspace,
    sweep_resource_size,
    sweep_subspace_size,
)
from .linalg import (
    SvdResult,
    is_orthogonal,
    nearest_orthogonal,
    orthogonality_error,
    random_orthogonal,
    svd,
)
from .objective import (
    PairBatch,
    SubspaceSpec,
    gradient,
    loss,
    multi_gradient,
    multi_loss,
    sample_batch,
)
from .projection import (
    LinearMap,
    OutputLexicon,
    TransformMatrix,
    emit_lexicon,
    fit_linear_map,
    load_output_lexicon,
    load_transform,
    orient,
    project,
    save_output_lexicon,
    save_transform,
    score_word,
)
from .resources import (
    LexiconResource,
    TrainingTable,
    binarize,
    frequency_lexicon,
    intersect,
    load_lexicon,
    split,
)
from .trainer import TrainConfig, TrainResult, learning_rate, train

__version__ = "0.1.0"

__all__ = [
    "EmbeddingSet",
    "EvalReport",
    "LexiconResource",
    "LinearMap",
    "OutputLexicon",
    "PairBatch",
    "SubspaceSpec",
    "SvdResult",
    "TrainConfig",
    "TrainResult",
    "TrainingTable",
    "TransformMatrix",
    "binarize",
    "emit_lexicon",
    "evaluate",
    "fisher_z_compare",
    "fit_linear_map",
    "frequency_lexicon",
    "gradient",
    "intersect",
    "is_orthogonal",
    "kendall_tau",
    "learning_rate",
    "load_embeddings",
    "load_lexicon",
    "load_output_lexicon",
    "load_transform",
    "loss",
    "multi_gradient",
    "multi_loss",
    "nearest_orthogonal",
    "normalize_embeddings",
    "orient",
    "orthogonality_error",
    "pca_subspace",
    "project",
    "random_orthogonal",
    "random_subspace",
    "sample_batch",
    "save_embeddings",
    "save_output_lexicon",
    "save_transform",
    "score_word",
    "split",
    "svd",
    "sweep_resource_size",
    "sweep_subspace_size",
    "top_k_filter",
    "train",
    "transform_embeddings",
]
