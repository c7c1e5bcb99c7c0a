"""Streaming statistical feature extraction over 3-axis accelerometer data.

Samples arrive one acquisition at a time (three signed 16-bit counts) and are
pushed into per-axis circular buffers of 32 samples. Every 32nd acquisition
the buffer contents are reduced to five statistics per axis (mean, median,
variance, max, min); the two most recent 15-value sets are concatenated into
the 30-element vector consumed by the classifiers. Windows are therefore
consecutive and non-overlapping, and the first vector appears at acquisition
64.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, StreamDiscontinuityError

WINDOW_SIZE = 32        # samples per axis buffer, also the emission period
SETS_PER_VECTOR = 2     # feature sets concatenated into one network input
FEATURES_PER_AXIS = 5   # mean, median, variance, max, min
AXIS_COUNT = 3
SET_LENGTH = FEATURES_PER_AXIS * AXIS_COUNT        # 15
VECTOR_LENGTH = SET_LENGTH * SETS_PER_VECTOR       # 30

FEATURE_NAMES_PER_AXIS = ("mean", "median", "variance", "max", "min")
AXIS_NAMES = ("x", "y", "z")

INT16_MIN = -32768
INT16_MAX = 32767


def feature_column_names() -> list[str]:
    """Column names f00..f29 of the feature dump CSV."""
    return [f"f{i:02d}" for i in range(VECTOR_LENGTH)]


@dataclass(frozen=True)
class Acquisition:
    """One accelerometer sample: monotonically increasing index + raw counts."""

    index: int
    x: int
    y: int
    z: int

    def __post_init__(self):
        for axis, value in zip(AXIS_NAMES, (self.x, self.y, self.z)):
            if not INT16_MIN <= value <= INT16_MAX:
                raise ValueError(
                    f"{axis} sample {value} outside signed 16-bit range"
                )


def _require_window(window) -> np.ndarray:
    w = np.asarray(window)
    if w.ndim != 1 or w.shape[0] != WINDOW_SIZE:
        raise DimensionError(
            f"window must hold exactly {WINDOW_SIZE} samples, got shape {w.shape}"
        )
    return w


def window_mean(window) -> float:
    """Arithmetic mean; summed exactly in 64-bit integers, divided once."""
    w = _require_window(window)
    return float(np.sum(w.astype(np.int64))) / WINDOW_SIZE


def window_median(window) -> float:
    """Average of the 16th and 17th order statistics (even-length window)."""
    w = _require_window(window)
    ordered = np.sort(w.astype(np.int64))
    half = WINDOW_SIZE // 2
    return float(ordered[half - 1] + ordered[half]) / 2.0


def window_variance(window) -> float:
    """Population variance (divisor 32), two-pass for exactness on 16-bit input."""
    w = _require_window(window).astype(np.int64)
    mean = float(np.sum(w)) / WINDOW_SIZE
    dev = w.astype(np.float64) - mean
    return float(np.sum(dev * dev)) / WINDOW_SIZE


def window_minmax(window) -> tuple[float, float]:
    """(minimum, maximum) of the window."""
    w = _require_window(window)
    return float(w.min()), float(w.max())


def window_features(window) -> np.ndarray:
    """The five per-axis statistics of one window, in canonical order."""
    lo, hi = window_minmax(window)
    return np.array(
        [window_mean(window), window_median(window), window_variance(window), hi, lo]
    )


class AxisBuffer:
    """Circular buffer of the most recent 32 samples for one axis."""

    capacity = WINDOW_SIZE

    def __init__(self):
        self._data = np.zeros(self.capacity, dtype=np.int64)
        self._next = 0
        self._count = 0

    def __len__(self):
        return min(self._count, self.capacity)

    @property
    def full(self) -> bool:
        return self._count >= self.capacity

    def push(self, value: int) -> None:
        self._data[self._next] = value
        self._next = (self._next + 1) % self.capacity
        self._count += 1

    def snapshot(self) -> np.ndarray:
        """Contents in arrival order (oldest first)."""
        if self.full:
            return np.concatenate((self._data[self._next:], self._data[:self._next]))
        return self._data[:self._next].copy()

    def clear(self) -> None:
        self._next = 0
        self._count = 0


@dataclass(frozen=True)
class FeatureSet:
    """15 per-window statistics: axes x, y, z; per axis mean/median/var/max/min."""

    window_index: int
    values: np.ndarray  # shape (15,)

    def axis(self, axis_index: int) -> np.ndarray:
        start = axis_index * FEATURES_PER_AXIS
        return self.values[start:start + FEATURES_PER_AXIS]


@dataclass(frozen=True)
class FeatureVector:
    """Network input: newest feature set followed by the previous one (30 values)."""

    window_index: int   # index of the newest contributing window
    values: np.ndarray  # shape (30,)


@dataclass
class FeatureExtractor:
    """Streaming extractor: push acquisitions, receive a FeatureVector every
    32nd acquisition once two complete windows have been seen.

    State is single-owner and mutated sequentially; run one extractor per
    stream. The window_* functions above are pure and reentrant.
    """

    _buffers: list = field(default_factory=lambda: [AxisBuffer() for _ in range(AXIS_COUNT)])
    _sets: list = field(default_factory=list)   # shift buffer, most recent last
    _expected_index: int | None = None
    _pushed: int = 0
    _windows_done: int = 0

    @property
    def windows_completed(self) -> int:
        return self._windows_done

    def reset(self) -> None:
        for buf in self._buffers:
            buf.clear()
        self._sets.clear()
        self._expected_index = None
        self._pushed = 0
        self._windows_done = 0

    def push(self, acq: Acquisition) -> FeatureVector | None:
        """Feed one acquisition; returns a FeatureVector when one is ready.

        Raises StreamDiscontinuityError on a non-consecutive index; the
        extractor must be reset() before further use.
        """
        if self._expected_index is not None and acq.index != self._expected_index:
            raise StreamDiscontinuityError(
                f"expected acquisition index {self._expected_index}, got {acq.index}"
            )
        self._expected_index = acq.index + 1

        for buf, value in zip(self._buffers, (acq.x, acq.y, acq.z)):
            buf.push(value)
        self._pushed += 1

        if self._pushed % WINDOW_SIZE != 0:
            return None

        self._windows_done += 1
        values = np.concatenate(
            [window_features(buf.snapshot()) for buf in self._buffers]
        )
        self._sets.append(FeatureSet(self._windows_done, values))
        if len(self._sets) > SETS_PER_VECTOR:
            self._sets.pop(0)
        if len(self._sets) < SETS_PER_VECTOR:
            return None

        newest, previous = self._sets[-1], self._sets[-2]
        return FeatureVector(
            window_index=newest.window_index,
            values=np.concatenate((newest.values, previous.values)),
        )
