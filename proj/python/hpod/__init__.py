"""Meta-learned hyperparameter optimization for unsupervised outlier detection."""

from ._hpod import (
    HpodConfigError,
    HpodDataError,
    HpodNumericError,
    MetaModel,
    average_precision,
    iforest_scores,
    lof_scores,
    meta_features,
    meta_train,
    normalized_ap_rank,
    optimize,
    standardize,
    top_q,
    wilcoxon_signed_rank,
)

__all__ = [
    "HpodConfigError",
    "HpodDataError",
    "HpodNumericError",
    "MetaModel",
    "average_precision",
    "iforest_scores",
    "lof_scores",
    "meta_features",
    "meta_train",
    "normalized_ap_rank",
    "optimize",
    "standardize",
    "top_q",
    "wilcoxon_signed_rank",
]
