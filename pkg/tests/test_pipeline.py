import numpy as np
import pytest

from ispukit import ActivityScript, ClassLabel, Pipeline, Segment, evaluate, generate
from ispukit.errors import EvaluationError
from ispukit.features import Acquisition
from ispukit.pipeline import majority_label


class ConstantModel:
    """Always predicts one class."""

    def __init__(self, label):
        self.label = label

    def infer(self, features):
        probs = np.full(5, 1e-9)
        probs[self.label] = 1.0 - 4e-9
        return probs, int(self.label)


class SeededRandomModel:
    """Uniform-random predictions from a private seeded generator."""

    def __init__(self, seed):
        self._rng = np.random.default_rng(seed)

    def infer(self, features):
        label = int(self._rng.integers(5))
        probs = np.full(5, 0.1)
        probs[label] = 0.6
        return probs, label


class OracleModel:
    """Predicts the majority ground truth, fed out of band by the test."""

    def __init__(self):
        self.next_truth = None

    def infer(self, features):
        probs = np.zeros(5)
        probs[self.next_truth] = 1.0
        return probs, int(self.next_truth)


def labeled_stream(script):
    for index, x, y, z, label in generate(script):
        yield Acquisition(index, x, y, z), label


def balanced_script(per_segment, seed=20, repeats=1):
    segments = tuple(
        Segment(label, per_segment) for _ in range(repeats) for label in ClassLabel
    )
    return ActivityScript(segments, seed=seed)


class TestStep:
    def test_single_event_at_64(self):
        pipe = Pipeline(ConstantModel(ClassLabel.IDLE))
        events = [
            pipe.step(Acquisition(i, 0, 0, 0), ClassLabel.IDLE) for i in range(64)
        ]
        fired = [e for e in events if e is not None]
        assert len(fired) == 1
        assert events[63] is not None

    def test_events_every_32_after_64(self):
        pipe = Pipeline(ConstantModel(ClassLabel.IDLE))
        fired_at = [
            i
            for i in range(200)
            if pipe.step(Acquisition(i, 0, 0, 0), ClassLabel.IDLE) is not None
        ]
        assert fired_at == [63, 95, 127, 159, 191]   # 0-based: acquisitions 64, 96, ...

    def test_replay_identical(self):
        script = balanced_script(128, seed=21)
        runs = []
        for _ in range(2):
            pipe = Pipeline(SeededRandomModel(99))
            runs.append(
                [(e.window_index, e.label) for e in pipe.run(labeled_stream(script))]
            )
        assert runs[0] == runs[1]

    def test_event_count_matches_schedule(self):
        for n in (0, 63, 64, 96, 100, 640):
            pipe = Pipeline(ConstantModel(0))
            count = sum(
                1
                for i in range(n)
                if pipe.step(Acquisition(i, 0, 0, 0)) is not None
            )
            assert count == max(0, n // 32 - 1)
            assert pipe.inference_count == count


class TestEvaluate:
    def test_perfect_model_accuracy_one(self):
        script = balanced_script(640, seed=22)
        model = OracleModel()

        pipe = Pipeline(model)
        recent = []
        for acq, label in labeled_stream(script):
            recent.append(label)
            if len(recent) >= 64:
                model.next_truth = majority_label(recent[-64:])
            else:
                model.next_truth = label
            pipe.step(acq, label)
        assert pipe.accuracy() == 1.0
        assert np.trace(pipe.confusion) == pipe.confusion.sum()

    def test_random_model_near_chance(self):
        # 5 classes x 12832 acquisitions = 64160 samples -> 2004 windows
        script = balanced_script(12832, seed=23)
        acc, confusion = evaluate(labeled_stream(script), SeededRandomModel(5))
        assert confusion.sum() >= 2000
        assert acc == pytest.approx(0.2, abs=0.05)

    def test_confusion_row_sums_are_per_class_window_counts(self):
        script = balanced_script(640, seed=24)
        model = SeededRandomModel(6)
        pipe = Pipeline(model)
        truth_counts = np.zeros(5, dtype=int)
        recent = []
        for acq, label in labeled_stream(script):
            recent.append(label)
            event = pipe.step(acq, label)
            if event is not None and event.true_label is not None:
                truth_counts[event.true_label] += 1
        assert pipe.confusion.sum(axis=1).tolist() == truth_counts.tolist()
        assert pipe.class_counts.sum() == pipe.inference_count

    def test_unlabeled_stream_rejected(self):
        stream = ((Acquisition(i, 0, 0, 0), None) for i in range(64))
        with pytest.raises(EvaluationError):
            evaluate(stream, ConstantModel(0))

    def test_accuracy_requires_windows(self):
        pipe = Pipeline(ConstantModel(0))
        with pytest.raises(EvaluationError):
            pipe.accuracy()


class TestMajorityVote:
    def test_simple_majority(self):
        labels = [ClassLabel.IDLE] * 40 + [ClassLabel.MOVE] * 24
        assert majority_label(labels) == ClassLabel.IDLE

    def test_tie_breaks_to_earlier_seen(self):
        labels = [ClassLabel.MOVE] * 32 + [ClassLabel.IDLE] * 32
        assert majority_label(labels) == ClassLabel.MOVE
        labels = [ClassLabel.IDLE] * 32 + [ClassLabel.MOVE] * 32
        assert majority_label(labels) == ClassLabel.IDLE
