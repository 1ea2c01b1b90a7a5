"""Quantization of features for logistic-regression scorecards.

Thin Python layer over the C++ library: build or load a dataset, fit one of
``glmdisc``, ``allr`` or ``mdlp-chi2``, then score, export or compare models.
"""

from ._core import (
    Dataset,
    DegenerateSplit,
    GlmdiscError,
    MissingValue,
    Model,
    NonFinite,
    SchemaMismatch,
    ShapeMismatch,
    SingleClass,
    TrainConfig,
    UnknownLevel,
    auc,
    benchmark,
    fit_allr,
    fit_mdlp_chi2,
    gini,
    load_csv,
    load_model,
    simulate,
    split,
    train,
)

__all__ = [
    "Dataset",
    "DegenerateSplit",
    "GlmdiscError",
    "MissingValue",
    "Model",
    "NonFinite",
    "SchemaMismatch",
    "ShapeMismatch",
    "SingleClass",
    "TrainConfig",
    "UnknownLevel",
    "auc",
    "benchmark",
    "fit",
    "fit_allr",
    "fit_mdlp_chi2",
    "gini",
    "load_csv",
    "load_model",
    "simulate",
    "split",
    "train",
]


def fit(dataset, method="glmdisc", **config):
    """Fit ``method`` on ``dataset``; keyword arguments set TrainConfig fields."""
    if method == "glmdisc":
        cfg = TrainConfig()
        for key, value in config.items():
            if not hasattr(cfg, key):
                raise TypeError(f"unknown training option '{key}'")
            setattr(cfg, key, value)
        return train(dataset, cfg)
    if config:
        raise TypeError(f"method '{method}' takes no training options")
    if method == "allr":
        return fit_allr(dataset)
    if method == "mdlp-chi2":
        return fit_mdlp_chi2(dataset)
    raise ValueError(f"unknown method '{method}' (expected glmdisc, allr or mdlp-chi2)")
