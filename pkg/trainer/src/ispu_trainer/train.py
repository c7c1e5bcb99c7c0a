"""Training loops for the catalog architectures.

Defaults (Adam, lr 1e-3, batch 32) are this trainer's choices; the
deployment contract only fixes the architecture shapes, the 100-epoch
default, and the export format. Everything is seeded and single-threaded so
a (seed, dataset) pair reproduces the exported bytes.
"""

import re
from dataclasses import dataclass, field

import numpy as np
import torch

from .data import Dataset, load_feature_csv, split
from .export import (
    binary_model_doc,
    float_model_doc,
    hidden_bit_patterns,
    reference_infer,
    write_model,
)
from .models import BinaryNet, FloatNet, sign_activation

_ARCH_RE = re.compile(r"^(float|binary)(?:_(\d+),(\d+))?$")

CLASS_NAMES = ("idle", "stand_up", "sit_down", "rotate", "move")


def parse_arch(name: str):
    """'Float_1,32' -> ('float', (32,)); bare 'Binary' -> ('binary', ())."""
    m = _ARCH_RE.match(name.strip().replace("{", "").replace("}", "").lower())
    if not m:
        raise ValueError(f"unknown architecture name {name!r}")
    kind = m.group(1)
    hidden = (int(m.group(3)),) * int(m.group(2)) if m.group(2) else ()
    if kind == "binary" and any(w % 32 for w in hidden):
        raise ValueError("binary hidden widths must be multiples of 32")
    return kind, hidden


@dataclass
class TrainConfig:
    arch: str
    data_path: str
    out_path: str
    epochs: int = 100
    seed: int = 0
    splits: tuple = (0.7, 0.15, 0.15)
    learning_rate: float = 1e-3
    batch_size: int = 32
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def _seed_everything(seed: int):
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    torch.set_num_threads(1)


def _accuracy(net, features, labels) -> float:
    net.eval()
    with torch.no_grad():
        logits = net(torch.from_numpy(features).float())
    return float((logits.argmax(dim=1).numpy() == labels).mean())


def _fit(net, train_set: Dataset, config: TrainConfig, binary: bool):
    opt = torch.optim.Adam(net.parameters(), lr=config.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss()
    order_rng = np.random.default_rng(config.seed + 1)
    x_all = torch.from_numpy(train_set.features).float()
    y_all = torch.from_numpy(train_set.labels)
    n = len(train_set.labels)
    for _ in range(config.epochs):
        net.train()
        epoch_order = order_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = epoch_order[start:start + config.batch_size]
            if len(batch) < 2:
                continue   # batch norm needs more than one sample
            opt.zero_grad()
            loss = loss_fn(net(x_all[batch]), y_all[batch])
            loss.backward()
            opt.step()
            if binary:
                net.clip_latent()
    net.eval()
    return net


def _train_common(config: TrainConfig, kind_expected: str):
    kind, hidden = parse_arch(config.arch)
    if kind != kind_expected:
        raise ValueError(f"architecture {config.arch!r} is not a {kind_expected} model")
    dataset = load_feature_csv(config.data_path)
    train_set, val_set, test_set = split(dataset, config.splits, config.seed)
    _seed_everything(config.seed)
    return hidden, dataset, train_set, val_set, test_set


def train_float(config: TrainConfig) -> dict:
    """Train a full-precision model and export it; returns a run summary."""
    hidden, dataset, train_set, val_set, test_set = _train_common(config, "float")
    net = _fit(FloatNet(hidden), train_set, config, binary=False)
    val_acc = _accuracy(net, val_set.features, val_set.labels)
    test_acc = _accuracy(net, test_set.features, test_set.labels)
    metadata = {
        "class_names": list(CLASS_NAMES),
        "feature_columns": list(dataset.feature_columns),
        "seed": config.seed,
        "epochs": config.epochs,
        "validation_accuracy": val_acc,
        "test_accuracy": test_acc,
        **config.metadata,
    }
    doc = float_model_doc(net, hidden, metadata)
    data = write_model(doc, config.out_path)

    # exported-vs-trained agreement before the file leaves the trainer
    probs_ref, labels_ref = reference_infer(doc, test_set.features)
    torch_labels = _predict_labels(net, test_set.features)
    agreement = float((labels_ref == torch_labels).mean())
    return {
        "kind": "float",
        "arch": config.arch,
        "val_accuracy": val_acc,
        "test_accuracy": test_acc,
        "export_agreement": agreement,
        "bytes": len(data),
        "out_path": config.out_path,
    }


def train_binary(config: TrainConfig) -> dict:
    """Train a binarized model, fold its batch norms, and export it."""
    hidden, dataset, train_set, val_set, test_set = _train_common(config, "binary")
    net = _fit(BinaryNet(hidden), train_set, config, binary=True)
    val_acc = _accuracy(net, val_set.features, val_set.labels)
    test_acc = _accuracy(net, test_set.features, test_set.labels)
    metadata = {
        "class_names": list(CLASS_NAMES),
        "feature_columns": list(dataset.feature_columns),
        "seed": config.seed,
        "epochs": config.epochs,
        "validation_accuracy": val_acc,
        "test_accuracy": test_acc,
        **config.metadata,
    }
    doc = binary_model_doc(net, hidden, metadata)
    data = write_model(doc, config.out_path)

    # folded-inference self-check: exported thresholds must reproduce the
    # torch model's hidden sign activations and labels on the training set
    probs_ref, labels_ref = reference_infer(doc, train_set.features)
    torch_labels = _predict_labels(net, train_set.features)
    label_agreement = float((labels_ref == torch_labels).mean())
    bit_agreement = _bit_agreement(net, doc, train_set.features)
    return {
        "kind": "binary",
        "arch": config.arch,
        "val_accuracy": val_acc,
        "test_accuracy": test_acc,
        "export_agreement": label_agreement,
        "bit_agreement": bit_agreement,
        "bytes": len(data),
        "out_path": config.out_path,
    }


def _predict_labels(net, features) -> np.ndarray:
    net.eval()
    with torch.no_grad():
        logits = net(torch.from_numpy(features).float())
    return logits.argmax(dim=1).numpy()


def _torch_bit_patterns(net: BinaryNet, features: np.ndarray):
    net.eval()
    with torch.no_grad():
        x = torch.from_numpy(features).float()
        x = torch.nn.functional.pad(x, (0, 32 - x.shape[1]))
        x = sign_activation(net.input_norm(x))
        patterns = [(x.numpy() > 0).astype(np.int64)]
        for layer, norm in zip(net.hidden, net.hidden_norms):
            x = sign_activation(norm(layer(x)))
            patterns.append((x.numpy() > 0).astype(np.int64))
    return patterns


def _bit_agreement(net, doc, features) -> float:
    """Fraction of hidden activation bits where the folded export equals the
    torch forward pass (float32 vs folded-float64 rounding can disagree only
    on exact batch-norm zero crossings)."""
    folded = hidden_bit_patterns(doc, features)
    trained = _torch_bit_patterns(net, features)
    total = agree = 0
    for a, b in zip(folded, trained):
        agree += int((a == b).sum())
        total += a.size
    return agree / total if total else 1.0
