"""Feedforward sigmoid network trained by backpropagation with momentum.

One hidden layer, logistic sigmoid on hidden and output units, mean-squared
error against softened one-hot targets, full-batch updates. Everything is
deterministic: weights come from the package LCG stream, updates are plain
matrix products in a fixed order, so a (seed, data, config) triple fully
determines the trained network.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .rng import Lcg64

TARGET_HI = 0.9
TARGET_LO = 0.1


@dataclass(frozen=True)
class Network:
    """Weights/biases per layer; weights[l] has shape (fan_out, fan_in)."""

    weights: tuple
    biases: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ValueError("weights and biases must pair up")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError("inconsistent layer shapes")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError("non-finite parameters")

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    error_goal: float = 1e-3
    max_epochs: int = 5000
    seed: int = 1

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if not self.error_goal > 0:
            raise ValueError(f"error goal must be positive, got {self.error_goal}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be positive, got {self.max_epochs}")


@dataclass(frozen=True)
class TrainRecord:
    epoch: int
    mse: float
    wall_time: float


@dataclass(frozen=True)
class Prediction:
    label: int
    confidence: float
    output_vector: np.ndarray
    rejected: bool


def init_network(layer_sizes, seed: int) -> Network:
    """Uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.

    Draws come row-major per layer from the package's 64-bit LCG (rng.Lcg64)
    seeded with `seed`, so identical seeds give bit-identical networks on
    any platform.
    """
    sizes = list(layer_sizes)
    if len(sizes) != 3 or any(s < 1 for s in sizes):
        raise ValueError(f"need three positive layer sizes, got {sizes}")
    gen = Lcg64(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = np.array(gen.uniforms(fan_out * fan_in, -bound, bound)).reshape(fan_out, fan_in)
        weights.append(w)
        biases.append(np.zeros(fan_out))
    return Network(weights=tuple(weights), biases=tuple(biases))


def _forward_batch(net: Network, x: np.ndarray):
    """x shape (n, d_in); returns activations [(n, d) per layer incl. input]."""
    acts = [x]
    for w, b in zip(net.weights, net.biases):
        acts.append(expit(acts[-1] @ w.T + b))
    return acts


def forward(net: Network, x) -> tuple[np.ndarray, list]:
    """Single forward pass; returns (output, per-layer activations)."""
    v = np.asarray(x, dtype=np.float64)
    d_in = net.layer_sizes[0]
    if v.shape != (d_in,):
        raise ValueError(f"expected a length-{d_in} input, got shape {v.shape}")
    acts = _forward_batch(net, v[None, :])
    return acts[-1][0], [a[0] for a in acts]


def _gradients_batch(net: Network, acts: list, targets: np.ndarray):
    """Gradient of mean-over-examples of (1/C) sum (o - t)^2."""
    n, c = targets.shape
    out = acts[-1]
    delta = (2.0 / (c * n)) * (out - targets) * out * (1.0 - out)
    grads_w, grads_b = [], []
    for layer in range(len(net.weights) - 1, -1, -1):
        grads_w.insert(0, delta.T @ acts[layer])
        grads_b.insert(0, delta.sum(axis=0))
        if layer > 0:
            back = delta @ net.weights[layer]
            delta = back * acts[layer] * (1.0 - acts[layer])
    return grads_w, grads_b


def compute_gradients(net: Network, x, target):
    """Backprop gradients of E = (1/C) sum_i (o_i - t_i)^2 for one example."""
    t = np.asarray(target, dtype=np.float64)
    c = net.layer_sizes[-1]
    if t.shape != (c,):
        raise ValueError(f"expected a length-{c} target, got shape {t.shape}")
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("target entries must lie in [0, 1]")
    _, acts = forward(net, x)
    return _gradients_batch(net, [a[None, :] for a in acts], t[None, :])


def batch_mse(net: Network, x: np.ndarray, targets: np.ndarray) -> float:
    out = _forward_batch(net, x)[-1]
    return float(np.mean((out - targets) ** 2))


def one_hot_targets(labels, classes: int) -> np.ndarray:
    """Softened one-hot rows: TARGET_HI at the label, TARGET_LO elsewhere.

    A single output unit is binary: label 1 targets TARGET_HI, label 0
    targets TARGET_LO (the same convention predict() reads back).
    """
    if classes == 1:
        t = np.empty((len(labels), 1))
        for i, lab in enumerate(labels):
            if lab not in (0, 1):
                raise ValueError(f"binary label must be 0 or 1, got {lab}")
            t[i, 0] = TARGET_HI if lab == 1 else TARGET_LO
        return t
    t = np.full((len(labels), classes), TARGET_LO)
    for i, lab in enumerate(labels):
        if not 0 <= lab < classes:
            raise ValueError(f"label {lab} outside 0..{classes - 1}")
        t[i, lab] = TARGET_HI
    return t


def train(net: Network, data, cfg: TrainConfig) -> tuple[Network, list]:
    """Full-batch gradient descent with momentum until goal or max_epochs.

    data is a list of (vector, label) pairs; every class 0..C-1 must appear.
    Returns the trained network and the per-epoch (epoch, mse, seconds)
    history; the recorded MSE is evaluated before that epoch's update, so a
    run that starts at the goal performs no update at all.
    """
    if not data:
        raise ValueError("training data is empty")
    classes = net.layer_sizes[-1]
    labels = [lab for _, lab in data]
    required = {0, 1} if classes == 1 else set(range(classes))
    missing = sorted(required - set(labels))
    if missing:
        raise ValueError(f"no training example for class(es) {missing}")
    x = np.asarray([np.asarray(v, dtype=np.float64) for v, _ in data])
    if x.shape[1] != net.layer_sizes[0]:
        raise ValueError(
            f"feature length {x.shape[1]} does not match input layer {net.layer_sizes[0]}"
        )
    targets = one_hot_targets(labels, classes)

    weights = [w.copy() for w in net.weights]
    biases = [b.copy() for b in net.biases]
    vel_w = [np.zeros_like(w) for w in weights]
    vel_b = [np.zeros_like(b) for b in biases]
    history = []
    start = time.perf_counter()
    current = Network(weights=tuple(weights), biases=tuple(biases))
    for epoch in range(1, cfg.max_epochs + 1):
        acts = _forward_batch(current, x)
        mse = float(np.mean((acts[-1] - targets) ** 2))
        history.append(TrainRecord(epoch=epoch, mse=mse, wall_time=time.perf_counter() - start))
        if mse <= cfg.error_goal:
            break
        grads_w, grads_b = _gradients_batch(current, acts, targets)
        for i in range(len(weights)):
            vel_w[i] = cfg.momentum * vel_w[i] - cfg.learning_rate * grads_w[i]
            vel_b[i] = cfg.momentum * vel_b[i] - cfg.learning_rate * grads_b[i]
            weights[i] = weights[i] + vel_w[i]
            biases[i] = biases[i] + vel_b[i]
        current = Network(weights=tuple(weights), biases=tuple(biases))
    return current, history


def predict(net: Network, x, reject_below: float = 0.0) -> Prediction:
    """Class of the strongest output unit, with sub-threshold rejection.

    With two or more output units the label is the argmax (lowest index on
    exact ties) and the confidence is that unit's activation. A single
    output unit is read as a binary score: label 1 when the output is at
    least 0.5, confidence is the probability assigned to the chosen side.
    """
    out, _ = forward(net, x)
    if out.size == 1:
        label = int(out[0] >= 0.5)
        confidence = float(out[0] if label == 1 else 1.0 - out[0])
    else:
        label = int(np.argmax(out))
        confidence = float(out[label])
    return Prediction(
        label=label,
        confidence=confidence,
        output_vector=out,
        rejected=confidence < reject_below,
    )


def macs_per_epoch(layer_sizes, n_examples: int) -> int:
    """Multiply-accumulate count of one full-batch epoch.

    Forward passes cost n(DH + HC); the backward pass costs the same two
    products again for the weight gradients plus one HC product to carry the
    error through the output weights; the momentum update touches every
    parameter once. Affine and strictly increasing in H.
    """
    d, h, c = layer_sizes
    n = n_examples
    forward_macs = n * (d * h + h * c)
    backward_macs = n * (d * h + 2 * h * c)
    update_macs = d * h + h * c + h + c
    return forward_macs + backward_macs + update_macs
