"""Bit-exact serialization of float and binary models.

A model file (conventional extension ``.ispu-model``) is a single JSON
document with sorted keys, two-space indentation, a trailing newline, and no
NaN/Infinity, which makes the byte output of ``save_model`` deterministic.
Real numbers use Python's shortest round-trip decimal form; packed binary
weight rows are space-separated lowercase 8-digit hex words in the layout
defined by the inference kernels (value i at bit i mod 32 of word i div 32).

Version "1" schema (see README for the field-by-field description):

    format:  "ispu-model"     version: "1"      kind: "float" | "binary"
    architecture:    {name, input, hidden: [...], output}
    input_batchnorm: {gamma[], beta[], mean[], std[], epsilon}
    layers (float):  [{weights[][], bias[], activation}, ...]
    layers (binary): [{rows[hex], thresholds[], flips[0/1]}, ..., {rows[hex]}]
    output_affine (binary): {scale[], shift[]}
    metadata: optional string-keyed object
"""

import json
import re

import numpy as np

from .binary import (
    WORD_BITS,
    BinaryDenseLayer,
    BinaryModel,
)
from .costs import ModelArchitecture
from .dense import BatchNormParams, DenseLayer, FloatModel
from .errors import (
    DegenerateNeuronError,
    DimensionError,
    ModelFormatError,
    ModelValidationError,
    WidthError,
)

FORMAT_NAME = "ispu-model"
SUPPORTED_VERSION = "1"
FILE_EXTENSION = ".ispu-model"

_HEX_WORD = re.compile(r"^[0-9a-f]{8}$")


def _check_finite(values, what: str):
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ModelValidationError(f"{what} contains non-finite values")
    return arr


def _norm_to_doc(params: BatchNormParams) -> dict:
    return {
        "gamma": params.gamma.tolist(),
        "beta": params.beta.tolist(),
        "mean": params.mean.tolist(),
        "std": params.std.tolist(),
        "epsilon": float(params.epsilon),
    }


def _norm_from_doc(doc, size: int, kind: str) -> BatchNormParams:
    if not isinstance(doc, dict):
        raise ModelFormatError("input_batchnorm must be an object")
    try:
        arrays = {k: _check_finite(doc[k], f"input_batchnorm.{k}") for k in
                  ("gamma", "beta", "mean", "std")}
    except KeyError as exc:
        raise ModelFormatError(f"input_batchnorm is missing {exc}") from None
    epsilon = float(doc.get("epsilon", BatchNormParams.__dataclass_fields__["epsilon"].default))
    for name, arr in arrays.items():
        if arr.shape != (size,):
            raise ModelValidationError(
                f"input_batchnorm.{name} must have length {size}, got {arr.shape}"
            )
    if kind == "binary" and np.any(arrays["gamma"] == 0.0):
        raise DegenerateNeuronError(
            "input batch-norm gamma of 0 makes the sign activation degenerate"
        )
    try:
        return BatchNormParams(epsilon=epsilon, **arrays)
    except (ValueError, DimensionError) as exc:
        raise ModelValidationError(str(exc)) from exc


def _pack_row_to_hex(words: np.ndarray) -> str:
    return " ".join(f"{int(w):08x}" for w in words)


def _hex_to_row(text: str, expected_words: int, layer_index: int) -> np.ndarray:
    parts = text.split(" ")
    if len(parts) != expected_words or any(not _HEX_WORD.match(p) for p in parts):
        raise ModelValidationError(
            f"weight row must be {expected_words} lowercase 8-digit hex words",
            layer_index=layer_index,
        )
    return np.array([int(p, 16) for p in parts], dtype=np.uint32)


def _model_to_doc(model) -> dict:
    hidden = list(model.hidden_widths)
    arch = ModelArchitecture(model.kind, tuple(hidden))
    doc = {
        "format": FORMAT_NAME,
        "version": SUPPORTED_VERSION,
        "kind": model.kind,
        "architecture": {
            "name": arch.name,
            "input": arch.input_size,
            "hidden": hidden,
            "output": arch.output_size,
        },
        "input_batchnorm": _norm_to_doc(model.input_norm),
    }
    if model.kind == "float":
        doc["layers"] = [
            {
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            }
            for layer in model.layers
        ]
    else:
        layers = []
        for layer in model.layers:
            entry = {"rows": [_pack_row_to_hex(row) for row in layer.weight_words]}
            if not layer.is_final:
                entry["thresholds"] = layer.thresholds.tolist()
                entry["flips"] = [int(f) for f in layer.flips]
            layers.append(entry)
        doc["layers"] = layers
        doc["output_affine"] = {
            "scale": model.output_scale.tolist(),
            "shift": model.output_shift.tolist(),
        }
    if model.metadata:
        doc["metadata"] = model.metadata
    return doc


def save_model(model, destination=None) -> bytes:
    """Serialize a model; returns the bytes and optionally writes them.

    destination may be a filesystem path or a binary file object. The byte
    output is deterministic: save(load(save(m))) == save(m).
    """
    doc = _model_to_doc(model)
    data = (json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("ascii")
    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(data)
        else:
            with open(destination, "wb") as fh:
                fh.write(data)
    return data


def _reject_nonfinite_constant(name):
    raise ModelFormatError(f"non-finite number {name!r} is not allowed")


def _load_float_layers(doc_layers, hidden, norm):
    layers = []
    sizes = [30, *hidden, 5]
    for i, entry in enumerate(doc_layers):
        if not isinstance(entry, dict) or "weights" not in entry or "bias" not in entry:
            raise ModelFormatError(f"float layer {i} must carry weights and bias")
        weights = _check_finite(entry["weights"], f"layer {i} weights")
        bias = _check_finite(entry["bias"], f"layer {i} bias")
        expected = ("softmax" if i == len(doc_layers) - 1 else "relu")
        activation = entry.get("activation", expected)
        if activation != expected:
            raise ModelValidationError(
                f"activation must be {expected!r}, got {activation!r}", layer_index=i
            )
        if weights.ndim != 2 or weights.shape != (sizes[i + 1], sizes[i]):
            raise ModelValidationError(
                f"weights shape {weights.shape} does not match declared "
                f"({sizes[i + 1]}, {sizes[i]})",
                layer_index=i,
            )
        if bias.shape != (sizes[i + 1],):
            raise ModelValidationError(
                f"bias length {bias.shape} does not match width {sizes[i + 1]}",
                layer_index=i,
            )
        layers.append(DenseLayer(weights, bias, activation))
    try:
        return FloatModel(norm, tuple(layers))
    except (ValueError, DimensionError) as exc:
        raise ModelValidationError(str(exc)) from exc


def _load_binary_layers(doc, doc_layers, hidden, norm):
    sizes = [32, *hidden, 5]
    layers = []
    for i, entry in enumerate(doc_layers):
        if not isinstance(entry, dict) or "rows" not in entry:
            raise ModelFormatError(f"binary layer {i} must carry packed weight rows")
        in_size, out_size = sizes[i], sizes[i + 1]
        if in_size % WORD_BITS != 0:
            raise WidthError(
                f"layer {i} input width {in_size} is not a multiple of {WORD_BITS}"
            )
        rows = entry["rows"]
        if len(rows) != out_size:
            raise ModelValidationError(
                f"{len(rows)} weight rows for declared width {out_size}", layer_index=i
            )
        words = np.stack([_hex_to_row(row, in_size // WORD_BITS, i) for row in rows])
        final = i == len(doc_layers) - 1
        if final:
            if "thresholds" in entry or "flips" in entry:
                raise ModelValidationError("final layer carries no thresholds", layer_index=i)
            layers.append(BinaryDenseLayer(in_size, words, is_final=True))
            continue
        if "thresholds" not in entry or "flips" not in entry:
            raise ModelValidationError(
                "hidden layer requires thresholds and flips", layer_index=i
            )
        thresholds = _check_finite(entry["thresholds"], f"layer {i} thresholds")
        flips = np.asarray(entry["flips"])
        if not np.isin(flips, (0, 1)).all():
            raise ModelValidationError("flips must be 0 or 1", layer_index=i)
        if thresholds.shape != (out_size,) or flips.shape != (out_size,):
            raise ModelValidationError(
                f"thresholds/flips must have length {out_size}", layer_index=i
            )
        layers.append(
            BinaryDenseLayer(in_size, words, thresholds, flips.astype(bool))
        )
    affine = doc.get("output_affine")
    if not isinstance(affine, dict) or "scale" not in affine or "shift" not in affine:
        raise ModelFormatError("binary model requires output_affine with scale and shift")
    scale = _check_finite(affine["scale"], "output_affine.scale")
    shift = _check_finite(affine["shift"], "output_affine.shift")
    try:
        return BinaryModel(norm, tuple(layers), scale, shift)
    except (ValueError, DimensionError) as exc:
        raise ModelValidationError(str(exc)) from exc


def load_model(source):
    """Parse and fully validate a model file.

    source may be a path, bytes, or a str containing the document. Raises
    ModelFormatError for malformed containers, ModelValidationError (with the
    offending layer index) for payload/architecture mismatches, WidthError
    for illegal binary widths, and DegenerateNeuronError for zero batch-norm
    scales feeding a sign activation.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        text = source
    elif hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text, parse_constant=_reject_nonfinite_constant)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a valid model document: {exc}") from exc

    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"missing format marker {FORMAT_NAME!r}")
    if str(doc.get("version")) != SUPPORTED_VERSION:
        raise ModelFormatError(
            f"unsupported version {doc.get('version')!r}; this reader supports "
            f"version {SUPPORTED_VERSION!r}"
        )
    kind = doc.get("kind")
    if kind not in ("float", "binary"):
        raise ModelFormatError(f"kind must be 'float' or 'binary', got {kind!r}")

    arch_doc = doc.get("architecture")
    if not isinstance(arch_doc, dict):
        raise ModelFormatError("missing architecture descriptor")
    hidden = [int(h) for h in arch_doc.get("hidden", [])]
    arch = ModelArchitecture(kind, tuple(hidden))   # raises WidthError on 48-wide etc.
    if int(arch_doc.get("input", arch.input_size)) != arch.input_size:
        raise ModelValidationError(
            f"declared input {arch_doc.get('input')} must be {arch.input_size} for "
            f"kind {kind}"
        )
    if int(arch_doc.get("output", arch.output_size)) != arch.output_size:
        raise ModelValidationError(
            f"declared output {arch_doc.get('output')} must be {arch.output_size}"
        )

    doc_layers = doc.get("layers")
    if not isinstance(doc_layers, list) or len(doc_layers) != len(hidden) + 1:
        raise ModelValidationError(
            f"expected {len(hidden) + 1} layers for {len(hidden)} hidden widths, "
            f"got {len(doc_layers) if isinstance(doc_layers, list) else 'none'}"
        )

    norm = _norm_from_doc(doc.get("input_batchnorm"), arch.input_size, kind)
    metadata = doc.get("metadata") or {}
    if kind == "float":
        model = _load_float_layers(doc_layers, hidden, norm)
    else:
        model = _load_binary_layers(doc, doc_layers, hidden, norm)
    if metadata:
        object.__setattr__(model, "metadata", dict(metadata))
    return model
