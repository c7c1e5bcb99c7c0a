#!/usr/bin/env python3
"""End-to-end pipeline on labeled synthetic data.

Generates a five-activity stream, steps it through extractor + model, and
prints the confusion matrix. The model here is untrained (random weights),
so the interesting part is the plumbing: event cadence, window ground truth
by majority vote, and the accuracy accounting.
"""

import numpy as np

from ispukit import (
    Acquisition,
    ActivityScript,
    ClassLabel,
    Pipeline,
    Segment,
    generate,
)
from ispukit import BatchNormParams, DenseLayer, FloatModel

rng = np.random.default_rng(3)
model = FloatModel(
    BatchNormParams.identity(30),
    (
        DenseLayer(rng.normal(0, 0.05, (32, 30)), np.zeros(32), "relu"),
        DenseLayer(rng.normal(0, 0.05, (5, 32)), np.zeros(5), "softmax"),
    ),
)

script = ActivityScript(
    tuple(Segment(label, 640) for label in ClassLabel), seed=21
)
pipe = Pipeline(model)
events = 0
for index, x, y, z, label in generate(script):
    event = pipe.step(Acquisition(index, x, y, z), label)
    if event is not None:
        events += 1

print(f"{script.total_acquisitions} acquisitions -> {events} classifications "
      f"(= {script.total_acquisitions // 32} windows - 1)")
print(f"accuracy of the untrained model: {pipe.accuracy():.3f} "
      "(chance is 0.2; train a real model with the companion trainer)")
print("\nconfusion matrix (rows = ground truth, cols = predicted):")
names = [lab.name.lower() for lab in ClassLabel]
print(" " * 10 + "".join(f"{n[:8]:>9}" for n in names))
for i, row in enumerate(pipe.confusion):
    print(f"{names[i][:9]:<10}" + "".join(f"{v:>9}" for v in row))
