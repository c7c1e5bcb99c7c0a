"""Binarized network forward pass.

Activations and weights live in {-1, +1}, stored one bit per value (bit 1 is
+1, bit 0 is -1). Value i of a vector sits at bit (i mod 32) of 32-bit word
(i div 32), little-endian bit numbering; this layout is part of the model
file contract. Dot products use the identity

    dot(a, b) = n - 2 * popcount(a XOR b)

and the batch norm that follows each hidden layer is folded offline into a
per-neuron threshold, so a hidden neuron is just a popcount and a compare.
The 5-class output layer keeps its integer preactivations and maps them to
logits through a per-class affine (scale, shift) before softmax.
"""

from dataclasses import dataclass, field

import numpy as np

from .dense import BatchNormParams, batchnorm_apply, softmax
from .errors import DegenerateNeuronError, DimensionError, WidthError

WORD_BITS = 32
PADDED_INPUT_SIZE = 32   # 30 features + 2 zero pads
CLASS_COUNT = 5

_M1 = np.uint32(0x55555555)
_M2 = np.uint32(0x33333333)
_M4 = np.uint32(0x0F0F0F0F)
_H8 = np.uint32(0x01010101)


def popcount32(words: np.ndarray) -> np.ndarray:
    """Per-element set-bit count of a uint32 array (SWAR, no lookup table)."""
    v = np.asarray(words, dtype=np.uint32)
    v = v - ((v >> np.uint32(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint32(2)) & _M2)
    v = (v + (v >> np.uint32(4))) & _M4
    return ((v * _H8) >> np.uint32(24)).astype(np.int64)


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 (or boolean) array whose length is a multiple of 32 into words."""
    b = np.asarray(bits).astype(np.uint64)
    if b.ndim != 1 or b.size % WORD_BITS != 0:
        raise WidthError(f"bit count {b.size} is not a multiple of {WORD_BITS}")
    shifts = np.arange(WORD_BITS, dtype=np.uint64)
    return (b.reshape(-1, WORD_BITS) << shifts).sum(axis=1).astype(np.uint32)


def unpack_bits(words: np.ndarray, n_bits: int) -> np.ndarray:
    """Inverse of pack_bits; returns a 0/1 int array of length n_bits."""
    w = np.asarray(words, dtype=np.uint32)
    shifts = np.arange(WORD_BITS, dtype=np.uint32)
    bits = ((w[:, None] >> shifts) & np.uint32(1)).reshape(-1)
    return bits[:n_bits].astype(np.int64)


@dataclass(frozen=True)
class BitVector:
    """Packed ±1 vector; bit 1 encodes +1."""

    words: np.ndarray
    n_bits: int

    def __post_init__(self):
        w = np.ascontiguousarray(self.words, dtype=np.uint32)
        object.__setattr__(self, "words", w)
        if self.n_bits % WORD_BITS != 0:
            raise WidthError(f"length {self.n_bits} is not a multiple of {WORD_BITS}")
        if w.shape != (self.n_bits // WORD_BITS,):
            raise DimensionError(
                f"{self.n_bits}-bit vector needs {self.n_bits // WORD_BITS} words, "
                f"got shape {w.shape}"
            )

    def __len__(self):
        return self.n_bits

    def __eq__(self, other):
        return (
            isinstance(other, BitVector)
            and self.n_bits == other.n_bits
            and bool(np.array_equal(self.words, other.words))
        )

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        bits = np.asarray(bits)
        return cls(pack_bits(bits), bits.size)

    @classmethod
    def from_signs(cls, signs) -> "BitVector":
        """Build from a ±1 vector (zeros count as +1)."""
        return cls.from_bits(np.asarray(signs) >= 0)

    def to_signs(self) -> np.ndarray:
        return 2 * unpack_bits(self.words, self.n_bits) - 1


def xnor_dot(a: BitVector, b: BitVector) -> int:
    """Exact ±1 dot product of two packed vectors."""
    if a.n_bits != b.n_bits:
        raise DimensionError(f"length mismatch: {a.n_bits} vs {b.n_bits}")
    return int(a.n_bits - 2 * popcount32(a.words ^ b.words).sum())


def fold_bn_threshold(gamma: float, beta: float, mean: float, std: float,
                      epsilon: float) -> tuple[float, bool]:
    """Fold batch norm + sign into an integer-preactivation threshold.

    Returns (tau, flip) such that the post-BN sign bit of preactivation a is
    (a >= tau) XOR flip.
    """
    if gamma == 0.0:
        raise DegenerateNeuronError("batch-norm gamma of 0 cannot be folded")
    if std < 0:
        raise ValueError("batch-norm std must be nonnegative")
    if epsilon <= 0:
        raise ValueError("batch-norm epsilon must be positive")
    tau = mean - beta * np.sqrt(std * std + epsilon) / gamma
    return float(tau), bool(gamma < 0)


def pad_input(features) -> np.ndarray:
    """Append two zeros so the 30-feature vector meets the 32-wide input rule."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (PADDED_INPUT_SIZE - 2,):
        raise DimensionError(f"expected 30 features, got shape {x.shape}")
    return np.concatenate((x, np.zeros(2)))


def binarize(x, params: BatchNormParams) -> BitVector:
    """Batch-normalize a real vector and take the sign (0 maps to +1)."""
    y = batchnorm_apply(x, params)
    return BitVector.from_bits(y >= 0.0)


@dataclass(frozen=True)
class BinaryDenseLayer:
    """One fully connected binary layer with folded batch-norm thresholds.

    weight_words holds one packed ±1 row per output neuron. Hidden layers
    compare the integer preactivation against per-neuron thresholds (XOR the
    flip flag to absorb negative batch-norm scales); the final layer keeps the
    raw integers.
    """

    in_size: int
    weight_words: np.ndarray            # (out, in_size/32) uint32
    thresholds: np.ndarray | None = None
    flips: np.ndarray | None = None
    is_final: bool = False

    def __post_init__(self):
        if self.in_size % WORD_BITS != 0:
            raise WidthError(
                f"layer input size {self.in_size} is not a multiple of {WORD_BITS}"
            )
        w = np.ascontiguousarray(self.weight_words, dtype=np.uint32)
        object.__setattr__(self, "weight_words", w)
        if w.ndim != 2 or w.shape[1] != self.in_size // WORD_BITS:
            raise DimensionError(
                f"weight rows of shape {w.shape} do not match input size {self.in_size}"
            )
        if self.is_final:
            if self.thresholds is not None or self.flips is not None:
                raise ValueError("final layer carries no thresholds")
            return
        if self.out_size % WORD_BITS != 0:
            # a hidden layer's bits become the next layer's input words
            raise WidthError(
                f"hidden width {self.out_size} is not a multiple of {WORD_BITS}"
            )
        if self.thresholds is None or self.flips is None:
            raise ValueError("hidden layer requires thresholds and flip flags")
        t = np.asarray(self.thresholds, dtype=np.float64)
        f = np.asarray(self.flips, dtype=bool)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "flips", f)
        if t.shape != (self.out_size,) or f.shape != (self.out_size,):
            raise DimensionError(
                f"thresholds/flips shapes {t.shape}/{f.shape} do not match "
                f"{self.out_size} neurons"
            )

    @property
    def out_size(self) -> int:
        return self.weight_words.shape[0]


def binary_dense_forward(x: BitVector, layer: BinaryDenseLayer):
    """All neurons of one layer: XNOR-popcount, then threshold (hidden) or
    raw integer preactivations (final)."""
    if x.n_bits != layer.in_size:
        raise DimensionError(
            f"layer expects {layer.in_size} bits, got {x.n_bits}"
        )
    xored = x.words[None, :] ^ layer.weight_words
    preact = layer.in_size - 2 * popcount32(xored).sum(axis=1)
    if layer.is_final:
        return preact
    bits = (preact >= layer.thresholds) ^ layer.flips
    return BitVector.from_bits(bits)


@dataclass(frozen=True)
class BinaryModel:
    """Input batch norm over the padded 32-vector, binary hidden layers, and a
    per-class affine bridging integer logits to softmax."""

    input_norm: BatchNormParams          # length 32, pad dims included
    layers: tuple
    output_scale: np.ndarray             # (5,)
    output_shift: np.ndarray             # (5,)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        scale = np.asarray(self.output_scale, dtype=np.float64)
        shift = np.asarray(self.output_shift, dtype=np.float64)
        object.__setattr__(self, "output_scale", scale)
        object.__setattr__(self, "output_shift", shift)
        if len(self.input_norm) != PADDED_INPUT_SIZE:
            raise DimensionError(
                f"input batch norm must cover {PADDED_INPUT_SIZE} values, "
                f"got {len(self.input_norm)}"
            )
        if not self.layers:
            raise DimensionError("model needs at least the output layer")
        size = PADDED_INPUT_SIZE
        for i, layer in enumerate(self.layers):
            if layer.in_size != size:
                raise DimensionError(
                    f"layer {i} expects input {layer.in_size}, chain provides {size}"
                )
            if layer.is_final != (i == len(self.layers) - 1):
                raise ValueError(f"layer {i} has a misplaced is_final flag")
            if not layer.is_final and layer.out_size % WORD_BITS != 0:
                raise WidthError(
                    f"hidden width {layer.out_size} is not a multiple of {WORD_BITS}"
                )
            size = layer.out_size
        if size != CLASS_COUNT:
            raise DimensionError(f"output size must be {CLASS_COUNT}, got {size}")
        if scale.shape != (CLASS_COUNT,) or shift.shape != (CLASS_COUNT,):
            raise DimensionError("output affine must provide 5 scales and 5 shifts")

    @property
    def kind(self) -> str:
        return "binary"

    @property
    def hidden_widths(self) -> tuple:
        return tuple(layer.out_size for layer in self.layers[:-1])

    def infer(self, features) -> tuple[np.ndarray, int]:
        return binary_infer(features, self)


def binary_infer(features, model: BinaryModel) -> tuple[np.ndarray, int]:
    """Pad, binarize, run the packed layers, then affine + softmax + argmax."""
    x = binarize(pad_input(features), model.input_norm)
    for layer in model.layers[:-1]:
        x = binary_dense_forward(x, layer)
    logits_int = binary_dense_forward(x, model.layers[-1])
    logits = model.output_scale * logits_int + model.output_shift
    probs = softmax(logits)
    return probs, int(np.argmax(probs))
