"""classdiff: classification-difficulty scores for labeled embedding sets."""

from .analysis import (
    AccuracyRecord,
    CorrelationReport,
    PolyFit,
    StudyResult,
    SubsetSpec,
    matrix_correlation,
    pearson,
    polyfit,
    run_study,
    sample_subsets,
)
from .errors import ClassDiffError, DataError, DegenerateError, UsageError
from .measures import (
    DifficultyScore,
    score_dataset,
    score_from_stats,
    soft_dist,
    soft_sim,
    weighted_dist,
    weighted_sim,
)
from .proxy import (
    EvalResult,
    SyntheticSpec,
    accuracy_matrix,
    generate,
    knn,
    nearest_centroid,
    proxy_accuracy,
    split,
)
from .similarity import (
    SimilaritySummary,
    cosine,
    inter_class,
    intra_class,
    mean_cosine_fast,
    pair_matrix,
    summarize,
    summarize_fast,
)
from .store import (
    ClassBlock,
    LabeledEmbeddingSet,
    NormalizedCache,
    build_cache,
    from_arrays,
    load_cache,
    load_dataset,
    save_cache,
    save_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyRecord",
    "ClassBlock",
    "ClassDiffError",
    "CorrelationReport",
    "DataError",
    "DegenerateError",
    "DifficultyScore",
    "EvalResult",
    "LabeledEmbeddingSet",
    "NormalizedCache",
    "PolyFit",
    "SimilaritySummary",
    "StudyResult",
    "SubsetSpec",
    "SyntheticSpec",
    "UsageError",
    "accuracy_matrix",
    "build_cache",
    "cosine",
    "from_arrays",
    "generate",
    "inter_class",
    "intra_class",
    "knn",
    "load_cache",
    "load_dataset",
    "matrix_correlation",
    "mean_cosine_fast",
    "nearest_centroid",
    "pair_matrix",
    "pearson",
    "polyfit",
    "proxy_accuracy",
    "run_study",
    "sample_subsets",
    "save_cache",
    "save_dataset",
    "score_dataset",
    "score_from_stats",
    "soft_dist",
    "soft_sim",
    "split",
    "summarize",
    "summarize_fast",
    "weighted_dist",
    "weighted_sim",
]
