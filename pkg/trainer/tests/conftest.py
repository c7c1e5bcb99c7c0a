import subprocess
import sys
import time

import pytest

from ispu_trainer import TrainConfig, train_binary, train_float

# ten segments, two intensity sweeps over the five activities
DATASET_SCRIPT = (
    "idle:3200,stand:3200,sit:3200,rotate:3200,move:3200,"
    "idle:3200:0.5,stand:3200:1.5,sit:3200:0.8,rotate:3200:1.3,move:3200:0.6"
)
DATASET_SEED = 123


def run_primary(args, **kwargs):
    """Invoke the inference-side CLI; the trainer only talks to it through
    its command line and file formats."""
    return subprocess.run(
        [sys.executable, "-m", "ispukit", *args],
        capture_output=True, text=True, **kwargs,
    )


@pytest.fixture(scope="session")
def dataset_path(tmp_path_factory):
    root = tmp_path_factory.mktemp("dataset")
    stream = root / "stream.csv"
    features = root / "features.csv"
    gen = run_primary(
        ["gen", "--seed", str(DATASET_SEED), "--script", DATASET_SCRIPT,
         "--out", str(stream)]
    )
    assert gen.returncode == 0, gen.stderr
    feat = run_primary(["features", "--in", str(stream), "--out", str(features)])
    assert feat.returncode == 0, feat.stderr
    return features


def _train(kind, arch, dataset, out_path, seed=0, epochs=100):
    config = TrainConfig(
        arch=arch, data_path=str(dataset), out_path=str(out_path),
        epochs=epochs, seed=seed,
    )
    train = train_float if kind == "float" else train_binary
    t0 = time.perf_counter()
    summary = train(config)
    summary["train_seconds"] = time.perf_counter() - t0
    return summary


@pytest.fixture(scope="session")
def float_run(dataset_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("models") / "float_1_32.ispu-model"
    return _train("float", "Float_1,32", dataset_path, out)


@pytest.fixture(scope="session")
def binary_run(dataset_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("models") / "binary_1_32.ispu-model"
    return _train("binary", "Binary_1,32", dataset_path, out)
