"""Event-driven end-to-end classifier: extractor -> model -> tallies.

One pipeline instance owns one stream. Every acquisition is stepped through
the feature extractor; whenever a 30-value vector is ready the loaded model
runs and a classification event is emitted. When the stream carries ground
truth, each classified window is scored against the majority label of the 64
samples spanned by its two contributing windows (ties break to the label
seen earliest among those samples) and a 5x5 confusion matrix accumulates.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .features import SETS_PER_VECTOR, WINDOW_SIZE, Acquisition, FeatureExtractor
from .labels import ClassLabel

CLASS_COUNT = 5
_SPAN = WINDOW_SIZE * SETS_PER_VECTOR   # samples contributing to one event


def majority_label(labels) -> ClassLabel:
    """Most frequent label; ties break to the earliest-seen label."""
    labels = list(labels)
    if not labels:
        raise EvaluationError("no labels to vote over")
    counts = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    for lab in labels:
        if counts[lab] == best:
            return ClassLabel(lab)


@dataclass(frozen=True)
class Classification:
    window_index: int
    label: int
    probabilities: np.ndarray
    true_label: ClassLabel | None = None


class Pipeline:
    """Binds a feature extractor to a model exposing infer(features)."""

    def __init__(self, model):
        self.model = model
        self.extractor = FeatureExtractor()
        self.inference_count = 0
        self.class_counts = np.zeros(CLASS_COUNT, dtype=np.int64)
        self.confusion = np.zeros((CLASS_COUNT, CLASS_COUNT), dtype=np.int64)
        self._recent_labels = deque(maxlen=_SPAN)

    def step(self, acq: Acquisition, label: ClassLabel | None = None):
        """Feed one acquisition; returns a Classification when one fires."""
        self._recent_labels.append(label)
        vector = self.extractor.push(acq)
        if vector is None:
            return None
        probs, predicted = self.model.infer(vector.values)
        self.inference_count += 1
        self.class_counts[predicted] += 1
        truth = None
        window = list(self._recent_labels)
        if len(window) == _SPAN and all(lab is not None for lab in window):
            truth = majority_label(window)
            self.confusion[truth, predicted] += 1
        return Classification(vector.window_index, predicted, probs, truth)

    def run(self, stream):
        """Step a (acquisition, label) iterable; yields classification events."""
        for acq, label in stream:
            event = self.step(acq, label)
            if event is not None:
                yield event

    def accuracy(self) -> float:
        total = self.confusion.sum()
        if total == 0:
            raise EvaluationError("no labeled windows were classified")
        return float(np.trace(self.confusion)) / float(total)


def evaluate(stream, model) -> tuple[float, np.ndarray]:
    """Classify a labeled stream; returns (accuracy, 5x5 confusion matrix).

    Raises EvaluationError if the stream carries no labels.
    """
    pipe = Pipeline(model)
    saw_unlabeled = False
    for acq, label in stream:
        if label is None:
            saw_unlabeled = True
        pipe.step(acq, label)
    if saw_unlabeled:
        raise EvaluationError("stream is not fully labeled")
    return pipe.accuracy(), pipe.confusion.copy()
