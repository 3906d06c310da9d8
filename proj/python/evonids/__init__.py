"""EVO feature selection and NSL-KDD intrusion-detection pipeline."""

from ._core import (
    Classifier,
    Dataset,
    EvoConfig,
    balance,
    binarize,
    class_names,
    classification_report,
    cost_function,
    evaluate,
    evo_run,
    feature_names,
    load_dataset,
    rastrigin,
    select_features,
    sphere,
    split,
    train,
)

__all__ = [
    "Classifier",
    "Dataset",
    "EvoConfig",
    "balance",
    "binarize",
    "class_names",
    "classification_report",
    "cost_function",
    "evaluate",
    "evo_run",
    "feature_names",
    "load_dataset",
    "rastrigin",
    "select_features",
    "sphere",
    "split",
    "train",
]
