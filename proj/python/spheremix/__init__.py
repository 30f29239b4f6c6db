"""Joint alignment of multi-source embeddings with spherical synonym clustering.

Thin re-export of the compiled core. Configs are JSON strings matching the
CLI schema; matrices cross the boundary as numpy arrays.
"""

from ._core import (
    InputError,
    FitResult,
    Scenario,
    __version__,
    adjusted_mutual_information,
    auc,
    concentration_from_resultant,
    evaluate,
    fit,
    fit_raw,
    hclust_average_cosine,
    kmeans_euclidean,
    log_bessel_i,
    mean_resultant_ratio,
    rel_acc,
    sample_vmf,
    simulate,
    spherical_kmeans,
    svd_concat_embed,
    vmf_log_normalizer,
)

__all__ = [
    "InputError",
    "FitResult",
    "Scenario",
    "__version__",
    "adjusted_mutual_information",
    "auc",
    "concentration_from_resultant",
    "evaluate",
    "fit",
    "fit_raw",
    "hclust_average_cosine",
    "kmeans_euclidean",
    "log_bessel_i",
    "mean_resultant_ratio",
    "rel_acc",
    "sample_vmf",
    "simulate",
    "spherical_kmeans",
    "svd_concat_embed",
    "vmf_log_normalizer",
]
