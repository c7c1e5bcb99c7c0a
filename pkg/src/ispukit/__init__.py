"""In-sensor activity recognition toolkit.

Streaming statistical feature extraction over 3-axis accelerometer data,
full-precision and binarized MLP inference with bit-packed XNOR-popcount
kernels, deterministic synthetic stream generation, and a cost model for an
ISPU-class target (MAC accounting, latency, energy, 40 KiB memory wall).
"""

from .binary import (
    BinaryDenseLayer,
    BinaryModel,
    BitVector,
    binarize,
    binary_dense_forward,
    binary_infer,
    fold_bn_threshold,
    pad_input,
    xnor_dot,
)
from .costs import (
    CATALOG,
    CalibrationTable,
    CostReport,
    ModelArchitecture,
    build_cost_report,
    canonical_macs,
    estimate_energy,
    estimate_latency,
    load_calibration,
    memory_footprint,
    reported_macs,
    parse_architecture,
    speedup,
)
from .dense import (
    BatchNormParams,
    DenseLayer,
    FloatModel,
    batchnorm_apply,
    dense_forward,
    float_infer,
    softmax,
)
from .features import (
    Acquisition,
    AxisBuffer,
    FeatureExtractor,
    FeatureSet,
    FeatureVector,
    window_mean,
    window_median,
    window_minmax,
    window_variance,
)
from .labels import CLASS_NAMES, ClassLabel
from .modelio import load_model, save_model
from .pipeline import Pipeline, evaluate
from .synth import ActivityScript, Segment, generate, parse_script

__version__ = "0.1.0"

__all__ = [
    "Acquisition",
    "ActivityScript",
    "AxisBuffer",
    "BatchNormParams",
    "BinaryDenseLayer",
    "BinaryModel",
    "BitVector",
    "CATALOG",
    "CLASS_NAMES",
    "CalibrationTable",
    "ClassLabel",
    "CostReport",
    "DenseLayer",
    "FeatureExtractor",
    "FeatureSet",
    "FeatureVector",
    "FloatModel",
    "ModelArchitecture",
    "Pipeline",
    "Segment",
    "batchnorm_apply",
    "binarize",
    "binary_dense_forward",
    "binary_infer",
    "build_cost_report",
    "canonical_macs",
    "dense_forward",
    "estimate_energy",
    "estimate_latency",
    "evaluate",
    "float_infer",
    "fold_bn_threshold",
    "generate",
    "load_calibration",
    "load_model",
    "memory_footprint",
    "pad_input",
    "reported_macs",
    "parse_architecture",
    "parse_script",
    "save_model",
    "softmax",
    "speedup",
    "window_mean",
    "window_median",
    "window_minmax",
    "window_variance",
    "xnor_dot",
]
