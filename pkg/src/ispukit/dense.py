"""Full-precision MLP forward pass: input batch normalization, dense+ReLU
hidden layers, dense+softmax output."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

INPUT_SIZE = 30
CLASS_COUNT = 5
DEFAULT_EPSILON = 1e-3

ACTIVATIONS = ("relu", "softmax", "none")


@dataclass(frozen=True)
class BatchNormParams:
    """Per-dimension normalization: y = gamma * (x - mean) / sqrt(std^2 + eps) + beta."""

    gamma: np.ndarray
    beta: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        arrays = {}
        for name in ("gamma", "beta", "mean", "std"):
            arrays[name] = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arrays[name])
        lengths = {a.shape for a in arrays.values()}
        if len(lengths) != 1 or arrays["gamma"].ndim != 1:
            raise DimensionError(f"batch-norm arrays disagree in shape: {lengths}")
        if self.epsilon <= 0:
            raise ValueError("batch-norm epsilon must be positive")
        if np.any(arrays["std"] < 0):
            raise ValueError("batch-norm std must be nonnegative")

    def __len__(self):
        return self.gamma.shape[0]

    @classmethod
    def identity(cls, size: int) -> "BatchNormParams":
        return cls(
            gamma=np.ones(size),
            beta=np.zeros(size),
            mean=np.zeros(size),
            std=np.ones(size),
        )


def batchnorm_apply(x, params: BatchNormParams) -> np.ndarray:
    """Apply batch normalization to a vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(params),):
        raise DimensionError(
            f"batch-norm expects length {len(params)}, got shape {x.shape}"
        )
    scale = params.gamma / np.sqrt(params.std ** 2 + params.epsilon)
    return scale * (x - params.mean) + params.beta


def softmax(z) -> np.ndarray:
    """Max-shifted softmax; output sums to 1 and never overflows."""
    z = np.asarray(z, dtype=np.float64)
    if z.size == 0:
        raise DimensionError("softmax input must be nonempty")
    e = np.exp(z - z.max())
    return e / e.sum()


@dataclass(frozen=True)
class DenseLayer:
    """Affine map y = W x + b followed by an activation tag."""

    weights: np.ndarray      # (out, in)
    bias: np.ndarray         # (out,)
    activation: str = "none"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise DimensionError(
                f"weights {w.shape} and bias {b.shape} are inconsistent"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def in_size(self) -> int:
        return self.weights.shape[1]

    @property
    def out_size(self) -> int:
        return self.weights.shape[0]


def dense_forward(x, layer: DenseLayer) -> np.ndarray:
    """One dense layer: affine map then activation."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (layer.in_size,):
        raise DimensionError(
            f"layer expects input length {layer.in_size}, got shape {x.shape}"
        )
    y = layer.weights @ x + layer.bias
    if layer.activation == "relu":
        return np.maximum(y, 0.0)
    if layer.activation == "softmax":
        return softmax(y)
    return y


@dataclass(frozen=True)
class FloatModel:
    """Input batch norm followed by a chain of dense layers (last one softmax)."""

    input_norm: BatchNormParams
    layers: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise DimensionError("model needs at least the output layer")
        if len(self.input_norm) != INPUT_SIZE:
            raise DimensionError(
                f"input batch norm must cover {INPUT_SIZE} features, got {len(self.input_norm)}"
            )
        size = INPUT_SIZE
        for i, layer in enumerate(self.layers):
            if layer.in_size != size:
                raise DimensionError(
                    f"layer {i} expects input {layer.in_size}, chain provides {size}"
                )
            size = layer.out_size
        if size != CLASS_COUNT:
            raise DimensionError(f"output size must be {CLASS_COUNT}, got {size}")
        if self.layers[-1].activation != "softmax":
            raise ValueError("final layer must use softmax activation")
        for layer in self.layers[:-1]:
            if layer.activation != "relu":
                raise ValueError("hidden layers must use relu activation")

    @property
    def kind(self) -> str:
        return "float"

    @property
    def hidden_widths(self) -> tuple:
        return tuple(layer.out_size for layer in self.layers[:-1])

    def infer(self, features) -> tuple[np.ndarray, int]:
        return float_infer(features, self)


def float_infer(features, model: FloatModel) -> tuple[np.ndarray, int]:
    """Run the full forward pass.

    Returns (probabilities over the 5 classes, argmax label with ties broken
    to the lowest class index).
    """
    x = batchnorm_apply(features, model.input_norm)
    for layer in model.layers:
        x = dense_forward(x, layer)
    return x, int(np.argmax(x))
