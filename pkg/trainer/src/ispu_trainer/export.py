"""Export trained networks to the portable model-file schema.

The target format (``.ispu-model`` version "1") is a JSON document with
sorted keys, two-space indent, trailing newline, no NaN/Infinity. Binary
weight rows pack value i into bit (i mod 32) of 32-bit word (i div 32),
written as space-separated lowercase 8-digit hex words; bit 1 encodes +1.
Hidden batch norms fold into per-neuron thresholds
``tau = mean - beta * sqrt(var + eps) / gamma`` with a flip flag for
negative gamma.

This module also carries a plain-numpy reader/evaluator for exported
documents, used to verify that what was written behaves like what was
trained before the file ever reaches the inference side.
"""

import json
import math

import numpy as np
import torch

ARCH_INPUT = {"float": 30, "binary": 32}


def _arch_name(kind, hidden):
    base = kind.capitalize()
    if not hidden:
        return base
    if len(set(hidden)) == 1:
        return f"{base}_{len(hidden)},{hidden[0]}"
    return base + "_" + "x".join(str(h) for h in hidden)


def _norm_doc(bn: torch.nn.BatchNorm1d) -> dict:
    return {
        "gamma": bn.weight.detach().numpy().astype(np.float64).tolist(),
        "beta": bn.bias.detach().numpy().astype(np.float64).tolist(),
        "mean": bn.running_mean.numpy().astype(np.float64).tolist(),
        "std": np.sqrt(bn.running_var.numpy().astype(np.float64)).tolist(),
        "epsilon": float(bn.eps),
    }


def pack_sign_row(signs) -> str:
    """+-1 (or 0/1) row -> space-separated lowercase hex words."""
    bits = [1 if v >= 0 else 0 for v in signs]
    if len(bits) % 32 != 0:
        raise ValueError("row length must be a multiple of 32")
    words = []
    for w in range(len(bits) // 32):
        value = 0
        for b in range(32):
            value |= bits[w * 32 + b] << b
        words.append(f"{value:08x}")
    return " ".join(words)


def fold_norm_rows(bn: torch.nn.BatchNorm1d):
    """Per-neuron (threshold, flip) from a trained hidden batch norm."""
    gamma = bn.weight.detach().numpy().astype(np.float64)
    beta = bn.bias.detach().numpy().astype(np.float64)
    mean = bn.running_mean.numpy().astype(np.float64)
    var = bn.running_var.numpy().astype(np.float64)
    if np.any(gamma == 0.0):
        raise ValueError("batch-norm gamma of exactly 0 cannot be folded")
    tau = mean - beta * np.sqrt(var + bn.eps) / gamma
    return tau, gamma < 0


def float_model_doc(net, hidden, metadata=None) -> dict:
    layers = []
    chain = [*net.hidden, net.final]
    for i, linear in enumerate(chain):
        layers.append(
            {
                "weights": linear.weight.detach().numpy().astype(np.float64).tolist(),
                "bias": linear.bias.detach().numpy().astype(np.float64).tolist(),
                "activation": "softmax" if i == len(chain) - 1 else "relu",
            }
        )
    doc = {
        "format": "ispu-model",
        "version": "1",
        "kind": "float",
        "architecture": {
            "name": _arch_name("float", hidden),
            "input": 30,
            "hidden": list(hidden),
            "output": 5,
        },
        "input_batchnorm": _norm_doc(net.input_norm),
        "layers": layers,
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def binary_model_doc(net, hidden, metadata=None) -> dict:
    layers = []
    for linear, norm in zip(net.hidden, net.hidden_norms):
        signs = torch.where(linear.weight >= 0, 1, -1).numpy()
        tau, flips = fold_norm_rows(norm)
        layers.append(
            {
                "rows": [pack_sign_row(row) for row in signs],
                "thresholds": tau.tolist(),
                "flips": [int(f) for f in flips],
            }
        )
    final_signs = torch.where(net.final.weight >= 0, 1, -1).numpy()
    layers.append({"rows": [pack_sign_row(row) for row in final_signs]})
    doc = {
        "format": "ispu-model",
        "version": "1",
        "kind": "binary",
        "architecture": {
            "name": _arch_name("binary", hidden),
            "input": 32,
            "hidden": list(hidden),
            "output": 5,
        },
        "input_batchnorm": _norm_doc(net.input_norm),
        "layers": layers,
        "output_affine": {
            "scale": net.out_scale.detach().numpy().astype(np.float64).tolist(),
            "shift": net.out_shift.detach().numpy().astype(np.float64).tolist(),
        },
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def write_model(doc: dict, path) -> bytes:
    data = (json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)
    return data


# --- reference evaluation of exported documents (numpy, float64) ------------

def _apply_norm(x, norm):
    gamma = np.asarray(norm["gamma"])
    beta = np.asarray(norm["beta"])
    mean = np.asarray(norm["mean"])
    std = np.asarray(norm["std"])
    return gamma * (x - mean) / np.sqrt(std * std + norm["epsilon"]) + beta


def _softmax(z):
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def unpack_row(text: str) -> np.ndarray:
    """Hex words -> +-1 vector, inverse of pack_sign_row."""
    signs = []
    for word in text.split(" "):
        value = int(word, 16)
        signs.extend(1 if (value >> b) & 1 else -1 for b in range(32))
    return np.array(signs, dtype=np.int64)


def reference_infer(doc: dict, features: np.ndarray):
    """(probabilities, labels) for a batch of 30-value feature rows."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if doc["kind"] == "float":
        out = _apply_norm(x, doc["input_batchnorm"])
        for i, layer in enumerate(doc["layers"]):
            out = out @ np.asarray(layer["weights"]).T + np.asarray(layer["bias"])
            if i < len(doc["layers"]) - 1:
                out = np.maximum(out, 0.0)
        probs = _softmax(out)
        return probs, probs.argmax(axis=1)

    padded = np.concatenate([x, np.zeros((x.shape[0], 2))], axis=1)
    signs = np.where(_apply_norm(padded, doc["input_batchnorm"]) >= 0, 1, -1)
    for layer in doc["layers"][:-1]:
        weights = np.stack([unpack_row(r) for r in layer["rows"]])
        preact = signs @ weights.T
        bits = (preact >= np.asarray(layer["thresholds"])) ^ np.asarray(
            layer["flips"], dtype=bool
        )
        signs = np.where(bits, 1, -1)
    weights = np.stack([unpack_row(r) for r in doc["layers"][-1]["rows"]])
    logits_int = signs @ weights.T
    affine = doc["output_affine"]
    logits = np.asarray(affine["scale"]) * logits_int + np.asarray(affine["shift"])
    probs = _softmax(logits)
    return probs, probs.argmax(axis=1)


def hidden_bit_patterns(doc: dict, features: np.ndarray):
    """Per-layer 0/1 activation matrices of a binary document (for the
    export self-check against the torch model's sign activations)."""
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    padded = np.concatenate([x, np.zeros((x.shape[0], 2))], axis=1)
    signs = np.where(_apply_norm(padded, doc["input_batchnorm"]) >= 0, 1, -1)
    patterns = [(signs > 0).astype(np.int64)]
    for layer in doc["layers"][:-1]:
        weights = np.stack([unpack_row(r) for r in layer["rows"]])
        preact = signs @ weights.T
        bits = (preact >= np.asarray(layer["thresholds"])) ^ np.asarray(
            layer["flips"], dtype=bool
        )
        patterns.append(bits.astype(np.int64))
        signs = np.where(bits, 1, -1)
    return patterns


def parity_check(doc: dict) -> bool:
    """Every hidden preactivation of a binary doc has the parity of its
    in-count; cheap structural sanity used after export."""
    if doc["kind"] != "binary":
        return True
    sizes = [32, *doc["architecture"]["hidden"]]
    return all(
        len(layer["rows"][0].split(" ")) * 32 == size
        for layer, size in zip(doc["layers"], sizes)
    )
