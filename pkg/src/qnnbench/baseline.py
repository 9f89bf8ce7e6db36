"""Parameter-matched dense baseline: dim*dim -> 2 -> 1, tanh throughout.

The hidden width of 2 is the unique integer reproducing the published
totals 13/23/37 for inputs of 4/9/16 features, and tanh on the output
keeps predictions in (-1, 1) so the same 1 - label*prediction loss
applies to both model families.  Inputs are the grid bits mapped to +-1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DatasetSplit

HIDDEN_WIDTH = 2


@dataclass
class DenseNet:
    weights: list[np.ndarray]  # per layer, shape (out, in)
    biases: list[np.ndarray]   # per layer, shape (out,)


def param_count(net: DenseNet) -> int:
    return sum(w.size for w in net.weights) + sum(b.size for b in net.biases)


def build_fair(dim: int, seed: int = 0) -> DenseNet:
    """Fresh network with uniform [-0.5, 0.5] weights and zero biases."""
    if dim not in (2, 3, 4):
        raise ValueError(f"dim must be 2, 3 or 4, got {dim}")
    rng = np.random.default_rng(seed)
    n_in = dim * dim
    return DenseNet(
        weights=[rng.uniform(-0.5, 0.5, size=(HIDDEN_WIDTH, n_in)),
                 rng.uniform(-0.5, 0.5, size=(1, HIDDEN_WIDTH))],
        biases=[np.zeros(HIDDEN_WIDTH), np.zeros(1)],
    )


def bits_to_features(bits: np.ndarray) -> np.ndarray:
    """Flatten grids row-major and map bit b to 2b - 1."""
    arr = np.asarray(bits, dtype=np.float64)
    flat = arr.reshape(len(arr), -1) if arr.ndim == 3 else arr.reshape(1, -1)
    return 2.0 * flat - 1.0


def forward(net: DenseNet, features: np.ndarray) -> np.ndarray | float:
    """Prediction in (-1, 1); accepts one feature vector or a stack."""
    feats = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if feats.shape[1] != net.weights[0].shape[1]:
        raise ValueError(f"expected {net.weights[0].shape[1]} features, got {feats.shape[1]}")
    hidden = np.tanh(feats @ net.weights[0].T + net.biases[0])
    out = np.tanh(hidden @ net.weights[1].T + net.biases[1])[:, 0]
    return out if np.asarray(features).ndim == 2 else float(out[0])


def loss_and_grads(net: DenseNet, feats: np.ndarray, labels: np.ndarray):
    """Mean 1 - label*prediction loss and its gradients by backprop."""
    labels = np.asarray(labels, dtype=np.float64)
    hidden = np.tanh(feats @ net.weights[0].T + net.biases[0])
    out = np.tanh(hidden @ net.weights[1].T + net.biases[1])[:, 0]
    loss = float(np.mean(1.0 - labels * out))

    d_out = (-labels / len(labels)) * (1.0 - out**2)          # through tanh
    g_w1 = d_out[:, None].T @ hidden
    g_b1 = np.array([d_out.sum()])
    d_hidden = np.outer(d_out, net.weights[1][0]) * (1.0 - hidden**2)
    g_w0 = d_hidden.T @ feats
    g_b0 = d_hidden.sum(axis=0)
    return loss, [g_w0, g_w1], [g_b0, g_b1]


def _sign_accuracy(outputs: np.ndarray, labels: np.ndarray) -> float:
    return float(np.mean(np.sign(outputs) == labels))


def train_fair(net: DenseNet, split: DatasetSplit, epochs: int, batch_size: int,
               r: float, seed: int) -> tuple[DenseNet, list[tuple[float, float]]]:
    """Mini-batch gradient descent; returns per-epoch (train loss, test accuracy)."""
    if len(split.train_labels) == 0 or len(split.test_labels) == 0:
        raise ValueError("split has an empty train or test set")
    if epochs < 1 or batch_size < 1 or r <= 0:
        raise ValueError("epochs and batch_size must be >= 1 and r > 0")
    train_feats = bits_to_features(split.train_bits)
    test_feats = bits_to_features(split.test_bits)
    train_labels = split.train_labels.astype(np.float64)
    rng = np.random.default_rng(seed)

    metrics = []
    for _ in range(epochs):
        order = rng.permutation(len(train_labels))
        loss_sum = 0.0
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            loss, g_w, g_b = loss_and_grads(net, train_feats[batch], train_labels[batch])
            loss_sum += loss * len(batch)
            for w, g in zip(net.weights, g_w):
                w -= r * g
            for b, g in zip(net.biases, g_b):
                b -= r * g
        test_acc = _sign_accuracy(forward(net, test_feats), split.test_labels)
        metrics.append((loss_sum / len(order), test_acc))
    return net, metrics
