"""Minimal dense networks with exact reverse-mode gradients.

Every actor, critic and cost critic in the package is an `Mlp`: tanh hidden
layers and an identity or tanh output chosen per role. Gradients are computed
analytically (no autodiff framework) and are checked against central finite
differences in the test suite, because the leader's two-path policy gradient
depends on input gradients being exact.

Heavy array work is delegated to csmarl._core so the compiled backend can be
swapped in transparently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core

__all__ = [
    "Mlp",
    "OptimizerState",
    "NonFiniteParameter",
    "init_mlp",
    "forward",
    "forward_with_cache",
    "gradients",
    "backward_from_cache",
    "make_optimizer",
    "apply_update",
    "soft_blend",
]


class NonFiniteParameter(RuntimeError):
    """A parameter left the finite range after an update (divergence)."""


class Mlp:
    """Feedforward net: tanh hidden activations, identity or tanh output."""

    __slots__ = ("layer_sizes", "weights", "biases", "output_activation")

    def __init__(self, layer_sizes, weights, biases, output_activation="identity"):
        if output_activation not in ("identity", "tanh"):
            raise ValueError(f"unknown output activation {output_activation!r}")
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if len(weights) != len(layer_sizes) - 1 or len(biases) != len(weights):
            raise ValueError("parameter count does not match layer_sizes")
        for l, (w, b) in enumerate(zip(weights, biases)):
            if w.shape != (layer_sizes[l], layer_sizes[l + 1]) or b.shape != (layer_sizes[l + 1],):
                raise ValueError(f"layer {l} parameter shapes inconsistent with layer_sizes")
        self.layer_sizes = list(layer_sizes)
        self.weights = list(weights)
        self.biases = list(biases)
        self.output_activation = output_activation

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "Mlp":
        return Mlp(
            self.layer_sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.output_activation,
        )

    def forward_batch(self, X: np.ndarray) -> np.ndarray:
        """Forward over stacked rows; (B, in_dim) -> (B, out_dim)."""
        Y, _ = _core.mlp_forward(
            np.ascontiguousarray(X, dtype=float), self.weights, self.biases,
            self.output_activation == "tanh",
        )
        return Y

    def value_and_input_grad(self, X: np.ndarray):
        """Scalar-output helper: values (B,) and d(value)/d(input) rows (B, in_dim)."""
        if self.out_dim != 1:
            raise ValueError("value_and_input_grad needs a scalar-output net")
        X = np.ascontiguousarray(X, dtype=float)
        Y, acts = _core.mlp_forward(X, self.weights, self.biases, self.output_activation == "tanh")
        ones = np.ones_like(Y)
        _, _, dX = _core.mlp_backward(acts, Y, self.weights, ones, self.output_activation == "tanh")
        return Y[:, 0], dX


def init_mlp(layer_sizes, output_activation="identity", *, rng) -> Mlp:
    """Uniform +-1/sqrt(fan_in) initialization for weights and biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return Mlp(layer_sizes, weights, biases, output_activation)


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    return np.ascontiguousarray(x), False


def forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Deterministic forward pass; accepts a vector or stacked rows."""
    X, squeeze = _as_batch(x)
    Y = net.forward_batch(X)
    return Y[0] if squeeze else Y


def forward_with_cache(net: Mlp, X: np.ndarray):
    X = np.ascontiguousarray(X, dtype=float)
    Y, acts = _core.mlp_forward(X, net.weights, net.biases, net.output_activation == "tanh")
    return Y, acts


def backward_from_cache(net: Mlp, cache, Y, upstream):
    """Gradients of sum(upstream * Y) given a forward cache.

    Returns (grads, input_grads) with grads a per-layer list of (dW, db)
    summed over the batch and input_grads per-row.
    """
    dWs, dbs, dX = _core.mlp_backward(
        cache, Y, net.weights, np.ascontiguousarray(upstream, dtype=float),
        net.output_activation == "tanh",
    )
    return list(zip(dWs, dbs)), dX


def gradients(net: Mlp, x: np.ndarray, upstream: np.ndarray):
    """Exact reverse-mode gradients of (upstream . output).

    Returns (grads, input_grad): per-layer (dW, db) pairs plus the gradient
    with respect to the input, which actor updates consume as the d(value)/
    d(action) terms. Vector inputs give vector input gradients; batched
    inputs give per-row input gradients with parameter gradients summed.
    """
    X, squeeze = _as_batch(x)
    U, _ = _as_batch(upstream)
    Y, acts = forward_with_cache(net, X)
    grads, dX = backward_from_cache(net, acts, Y, U)
    return grads, (dX[0] if squeeze else dX)


@dataclass
class OptimizerState:
    """First-order optimizer state bound to one network's parameter shapes."""

    kind: str  # "sgd" | "adam"
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def make_optimizer(net: Mlp, kind: str = "adam", learning_rate: float = 1e-3) -> OptimizerState:
    if kind not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer kind {kind!r}")
    if learning_rate <= 0:
        raise ValueError("learning rate must be positive")
    state = OptimizerState(kind=kind, learning_rate=learning_rate)
    if kind == "adam":
        for w, b in zip(net.weights, net.biases):
            state.m.append((np.zeros_like(w), np.zeros_like(b)))
            state.v.append((np.zeros_like(w), np.zeros_like(b)))
    return state


def apply_update(net: Mlp, state: OptimizerState, grads, direction: str = "descent") -> None:
    """One in-place first-order step; ascent flips the gradient sign.

    Raises NonFiniteParameter if any parameter leaves the finite range,
    which callers treat as a diverged run.
    """
    if direction not in ("descent", "ascent"):
        raise ValueError(f"direction must be 'descent' or 'ascent', got {direction!r}")
    sign = 1.0 if direction == "descent" else -1.0
    state.step += 1
    lr = state.learning_rate
    for l, (dW, db) in enumerate(grads):
        if state.kind == "sgd":
            net.weights[l] -= sign * lr * dW
            net.biases[l] -= sign * lr * db
        else:
            bc1 = 1.0 - state.beta1 ** state.step
            bc2 = 1.0 - state.beta2 ** state.step
            for param, grad, m, v in (
                (net.weights[l], dW, state.m[l][0], state.v[l][0]),
                (net.biases[l], db, state.m[l][1], state.v[l][1]),
            ):
                m *= state.beta1
                m += (1.0 - state.beta1) * grad
                v *= state.beta2
                v += (1.0 - state.beta2) * grad * grad
                param -= sign * lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    for w, b in zip(net.weights, net.biases):
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise NonFiniteParameter("parameters diverged to non-finite values")


def soft_blend(target: Mlp, online: Mlp, rho: float) -> Mlp:
    """Elementwise convex combination rho*target + (1-rho)*online."""
    if target.layer_sizes != online.layer_sizes or target.output_activation != online.output_activation:
        raise ValueError("soft_blend needs identical architectures")
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    weights = [rho * tw + (1.0 - rho) * ow for tw, ow in zip(target.weights, online.weights)]
    biases = [rho * tb + (1.0 - rho) * ob for tb, ob in zip(target.biases, online.biases)]
    return Mlp(target.layer_sizes, weights, biases, target.output_activation)
