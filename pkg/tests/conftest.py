import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ispukit import (
    BatchNormParams,
    BinaryDenseLayer,
    BinaryModel,
    DenseLayer,
    FloatModel,
    fold_bn_threshold,
)
from ispukit.binary import pack_bits


def random_norm(rng, size, keep_gamma_away_from_zero=True):
    gamma = rng.uniform(0.2, 2.0, size) * rng.choice((-1.0, 1.0), size)
    if not keep_gamma_away_from_zero:
        gamma = rng.normal(0.0, 1.0, size)
    return BatchNormParams(
        gamma=gamma,
        beta=rng.normal(0.0, 1.0, size),
        mean=rng.normal(0.0, 2.0, size),
        std=rng.uniform(0.1, 3.0, size),
        epsilon=float(rng.uniform(1e-5, 1e-2)),
    )


def random_float_model(rng, hidden=()):
    sizes = [30, *hidden, 5]
    layers = []
    for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        activation = "softmax" if i == len(sizes) - 2 else "relu"
        layers.append(
            DenseLayer(
                weights=rng.normal(0.0, 1.0, (n_out, n_in)) / np.sqrt(n_in),
                bias=rng.normal(0.0, 0.5, n_out),
                activation=activation,
            )
        )
    return FloatModel(random_norm(rng, 30), tuple(layers))


def norm_tuple(params):
    return (
        params.gamma.tolist(),
        params.beta.tolist(),
        params.mean.tolist(),
        params.std.tolist(),
        params.epsilon,
    )


def random_binary_model(rng, hidden=()):
    """Returns (model, oracle_params) where oracle_params carries the
    pre-fold batch-norm rows the float-BNN reference needs."""
    input_norm = random_norm(rng, 32)
    sizes = [32, *hidden, 5]
    layers = []
    oracle_hidden = []
    for n_in, n_out in zip(sizes[:-1], sizes[1:-1] if len(sizes) > 2 else []):
        signs = rng.choice((-1, 1), (n_out, n_in))
        bn_rows = [
            (
                float(rng.uniform(0.2, 2.0) * rng.choice((-1.0, 1.0))),
                float(rng.normal(0.0, 1.0)),
                float(rng.normal(0.0, 4.0)),
                float(rng.uniform(0.5, 4.0)),
                1e-3,
            )
            for _ in range(n_out)
        ]
        folded = [fold_bn_threshold(*row) for row in bn_rows]
        layers.append(
            BinaryDenseLayer(
                in_size=n_in,
                weight_words=np.stack([pack_bits(r >= 0) for r in signs]),
                thresholds=np.array([tau for tau, _ in folded]),
                flips=np.array([flip for _, flip in folded]),
            )
        )
        oracle_hidden.append((signs.tolist(), bn_rows))
    final_in = sizes[-2]
    final_signs = rng.choice((-1, 1), (5, final_in))
    layers.append(
        BinaryDenseLayer(
            in_size=final_in,
            weight_words=np.stack([pack_bits(r >= 0) for r in final_signs]),
            is_final=True,
        )
    )
    scale = rng.uniform(0.05, 0.5, 5)
    shift = rng.normal(0.0, 1.0, 5)
    model = BinaryModel(input_norm, tuple(layers), scale, shift)
    oracle_params = {
        "input_norm": norm_tuple(input_norm),
        "hidden": oracle_hidden,
        "final_weights": final_signs.tolist(),
        "scale": scale.tolist(),
        "shift": shift.tolist(),
    }
    return model, oracle_params


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
