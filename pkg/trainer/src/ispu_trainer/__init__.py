"""Trainer for the in-sensor activity-recognition models.

Consumes labeled feature CSVs (as produced by ``ispukit features``), trains
full-precision or binarized MLPs with PyTorch, and exports ``.ispu-model``
files in the documented portable schema.
"""

from .data import Dataset, load_feature_csv, split
from .export import binary_model_doc, float_model_doc, reference_infer, write_model
from .train import TrainConfig, parse_arch, train_binary, train_float

__all__ = [
    "Dataset",
    "TrainConfig",
    "binary_model_doc",
    "float_model_doc",
    "load_feature_csv",
    "parse_arch",
    "reference_infer",
    "split",
    "train_binary",
    "train_float",
    "write_model",
]
