"""Torch model definitions: a plain MLP and its binarized twin.

Binarization uses the straight-through estimator: forward passes see hard
±1 signs (ties at 0 go to +1), backward passes treat the sign as identity —
clipped to |x| <= 1 for activations, unclipped for the latent weights, which
are themselves kept inside [-1, 1] after every optimizer step.
"""

import torch
from torch import nn

BN_EPSILON = 1e-3
PADDED_INPUT = 32
CLASS_COUNT = 5


class _SignActivation(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x):
        ctx.save_for_backward(x)
        return torch.where(x >= 0, 1.0, -1.0).to(x.dtype)

    @staticmethod
    def backward(ctx, grad):
        (x,) = ctx.saved_tensors
        return grad * (x.abs() <= 1.0).to(grad.dtype)


def sign_activation(x):
    return _SignActivation.apply(x)


class BinarizedLinear(nn.Module):
    """Linear layer whose effective weights are sign(latent weights)."""

    def __init__(self, in_features, out_features):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = nn.Parameter(torch.empty(out_features, in_features))
        nn.init.uniform_(self.weight, -0.8, 0.8)

    def binary_weight(self):
        w = self.weight
        hard = torch.where(w >= 0, 1.0, -1.0).to(w.dtype)
        return w + (hard - w).detach()   # straight-through to the latent weights

    def forward(self, x):
        return nn.functional.linear(x, self.binary_weight())

    def clip_latent(self):
        with torch.no_grad():
            self.weight.clamp_(-1.0, 1.0)


class FloatNet(nn.Module):
    """Input batch norm, dense+ReLU hidden stack, dense output (logits)."""

    def __init__(self, hidden):
        super().__init__()
        self.input_norm = nn.BatchNorm1d(30, eps=BN_EPSILON)
        sizes = [30, *hidden]
        self.hidden = nn.ModuleList(
            nn.Linear(a, b) for a, b in zip(sizes[:-1], sizes[1:])
        )
        self.final = nn.Linear(sizes[-1], CLASS_COUNT)

    def forward(self, x):
        x = self.input_norm(x)
        for layer in self.hidden:
            x = torch.relu(layer(x))
        return self.final(x)


class BinaryNet(nn.Module):
    """Zero-padded input, batch norm + sign front end, binarized hidden
    layers each followed by batch norm + sign, binarized output layer with a
    per-class affine on the integer-valued logits."""

    def __init__(self, hidden):
        super().__init__()
        for width in hidden:
            if width % 32 != 0:
                raise ValueError(f"binary hidden width {width} not a multiple of 32")
        self.input_norm = nn.BatchNorm1d(PADDED_INPUT, eps=BN_EPSILON)
        sizes = [PADDED_INPUT, *hidden]
        self.hidden = nn.ModuleList(
            BinarizedLinear(a, b) for a, b in zip(sizes[:-1], sizes[1:])
        )
        self.hidden_norms = nn.ModuleList(
            nn.BatchNorm1d(w, eps=BN_EPSILON) for w in hidden
        )
        self.final = BinarizedLinear(sizes[-1], CLASS_COUNT)
        self.out_scale = nn.Parameter(torch.full((CLASS_COUNT,), 0.1))
        self.out_shift = nn.Parameter(torch.zeros(CLASS_COUNT))

    def forward(self, x):
        x = nn.functional.pad(x, (0, PADDED_INPUT - x.shape[1]))
        x = sign_activation(self.input_norm(x))
        for layer, norm in zip(self.hidden, self.hidden_norms):
            x = sign_activation(norm(layer(x)))
        return self.out_scale * self.final(x) + self.out_shift

    def clip_latent(self):
        for layer in self.hidden:
            layer.clip_latent()
        self.final.clip_latent()
