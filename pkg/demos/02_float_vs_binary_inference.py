#!/usr/bin/env python3
"""Float vs binarized forward pass on the same feature vector.

Builds one full-precision model and one binary model of matching shape,
shows the XNOR-popcount identity on a tiny packed example, and runs both
models end to end.
"""

import numpy as np

from ispukit import (
    BatchNormParams,
    BinaryDenseLayer,
    BinaryModel,
    BitVector,
    DenseLayer,
    FloatModel,
    fold_bn_threshold,
    xnor_dot,
)
from ispukit.binary import pack_bits

rng = np.random.default_rng(7)

# --- the packed dot product ------------------------------------------------
a = rng.choice((-1, 1), 64)
b = rng.choice((-1, 1), 64)
packed = xnor_dot(BitVector.from_signs(a), BitVector.from_signs(b))
print(f"+-1 dot product of 64 values: naive {int(a @ b)}, "
      f"xnor-popcount {packed}")
assert packed == int(a @ b)

# --- a float model: 30 -> 32 (relu) -> 5 (softmax) ---------------------------
float_model = FloatModel(
    BatchNormParams.identity(30),
    (
        DenseLayer(rng.normal(0, 0.2, (32, 30)), rng.normal(0, 0.1, 32), "relu"),
        DenseLayer(rng.normal(0, 0.2, (5, 32)), np.zeros(5), "softmax"),
    ),
)

# --- a binary model of the same shape: 32 -> 32 -> 5 -------------------------
hidden_signs = rng.choice((-1, 1), (32, 32))
folded = [fold_bn_threshold(float(g), float(bta), float(m), float(s), 1e-3)
          for g, bta, m, s in zip(rng.uniform(0.3, 1.5, 32),
                                  rng.normal(0, 1, 32),
                                  rng.normal(0, 3, 32),
                                  rng.uniform(0.5, 2.0, 32))]
final_signs = rng.choice((-1, 1), (5, 32))
binary_model = BinaryModel(
    BatchNormParams.identity(32),
    (
        BinaryDenseLayer(
            32,
            np.stack([pack_bits(r >= 0) for r in hidden_signs]),
            thresholds=np.array([t for t, _ in folded]),
            flips=np.array([f for _, f in folded]),
        ),
        BinaryDenseLayer(
            32, np.stack([pack_bits(r >= 0) for r in final_signs]), is_final=True
        ),
    ),
    output_scale=np.full(5, 0.1),
    output_shift=np.zeros(5),
)

features = rng.normal(0, 5, 30)
fp, fl = float_model.infer(features)
bp, bl = binary_model.infer(features)
print(f"\nfloat model : probs {np.round(fp, 3)} -> class {fl}")
print(f"binary model: probs {np.round(bp, 3)} -> class {bl}")
print("\nbinary hidden layer stores", binary_model.layers[0].weight_words.nbytes,
      "bytes of weights vs", float_model.layers[0].weights.nbytes,
      "bytes for the float layer of the same shape")
