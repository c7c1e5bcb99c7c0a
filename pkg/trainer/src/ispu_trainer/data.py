"""Feature-CSV loading and deterministic splitting.

The dataset is the output of ``ispukit features`` on a labeled stream:
columns f00..f29, window_index, label. The 30-column feature ordering is
part of the model contract, so the header is kept and written into exported
model metadata.
"""

import csv
from dataclasses import dataclass

import numpy as np

FEATURE_COUNT = 30
CLASS_COUNT = 5


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray        # (n, 30) float64
    labels: np.ndarray          # (n,) int64
    feature_columns: tuple      # header names of the 30 feature columns


def load_feature_csv(path) -> Dataset:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header[:FEATURE_COUNT] != [f"f{i:02d}" for i in range(FEATURE_COUNT)]:
            raise ValueError("expected feature columns f00..f29 first")
        if "label" not in header:
            raise ValueError("training requires a labeled feature CSV")
        label_col = header.index("label")
        rows, labels = [], []
        for row in reader:
            if not row:
                continue
            rows.append([float(v) for v in row[:FEATURE_COUNT]])
            labels.append(int(row[label_col]))
    if not rows:
        raise ValueError(f"no feature rows in {path}")
    y = np.array(labels, dtype=np.int64)
    if y.min() < 0 or y.max() >= CLASS_COUNT:
        raise ValueError("labels must be class codes 0..4")
    return Dataset(np.array(rows), y, tuple(header[:FEATURE_COUNT]))


def split(dataset: Dataset, ratios=(0.7, 0.15, 0.15), seed: int = 0):
    """Shuffled train/validation/test split; ratios must sum to 1."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    n = len(dataset.labels)
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(ratios[0] * n))
    n_val = int(round(ratios[1] * n))
    parts = (order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:])
    return tuple(
        Dataset(dataset.features[idx], dataset.labels[idx], dataset.feature_columns)
        for idx in parts
    )
