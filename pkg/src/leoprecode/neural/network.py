"""Dense / batch-norm / leaky-ReLU stacks with hand-written backprop.

All parameters of a network live in one flat float64 vector ``params`` and
their gradients in ``grads`` with the same layout; layers hold reshaped
views into both, so optimizers and checkpoints only ever see flat vectors.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import BatchTooSmall, CallOrder


class Dense:
    has_state = False

    def __init__(self, n_in: int, n_out: int):
        self.n_in, self.n_out = n_in, n_out
        self.param_shapes = [(n_in, n_out), (n_out,)]
        self._x = None

    def bind(self, params, grads):
        self.W, self.b = params
        self.dW, self.db = grads

    def initialize(self, rng: np.random.Generator):
        # Glorot uniform kernel, zero bias
        limit = np.sqrt(6.0 / (self.n_in + self.n_out))
        self.W[...] = rng.uniform(-limit, limit, size=self.W.shape)
        self.b[...] = 0.0

    def forward(self, x, training):
        self._x = x
        return x @ self.W + self.b

    def backward(self, dy):
        if self._x is None:
            raise CallOrder("Dense.backward before forward")
        self.dW[...] = self._x.T @ dy
        self.db[...] = dy.sum(axis=0)
        return dy @ self.W.T


class BatchNorm:
    """Per-feature batch normalization with running statistics for inference."""

    has_state = True

    def __init__(self, width: int, momentum: float = 0.99, epsilon: float = 1e-5):
        if not 0 < momentum < 1:
            raise ValueError("momentum must be in (0, 1)")
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        self.width = width
        self.momentum = momentum
        self.epsilon = epsilon
        self.param_shapes = [(width,), (width,)]
        self.running_mean = np.zeros(width)
        self.running_var = np.ones(width)
        self._cache = None

    def bind(self, params, grads):
        self.gamma, self.beta = params
        self.dgamma, self.dbeta = grads

    def initialize(self, rng):
        self.gamma[...] = 1.0
        self.beta[...] = 0.0
        self.running_mean[...] = 0.0
        self.running_var[...] = 1.0

    def forward(self, x, training):
        if training:
            if x.shape[0] < 2:
                raise BatchTooSmall("batch norm needs at least 2 samples in training mode")
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            inv_std = 1.0 / np.sqrt(var + self.epsilon)
            xhat = (x - mean) * inv_std
            m = self.momentum
            self.running_mean[...] = m * self.running_mean + (1 - m) * mean
            self.running_var[...] = m * self.running_var + (1 - m) * var
            self._cache = (True, xhat, inv_std)
        else:
            inv_std = 1.0 / np.sqrt(self.running_var + self.epsilon)
            xhat = (x - self.running_mean) * inv_std
            self._cache = (False, xhat, inv_std)
        return self.gamma * xhat + self.beta

    def backward(self, dy):
        if self._cache is None:
            raise CallOrder("BatchNorm.backward before forward")
        training, xhat, inv_std = self._cache
        self.dgamma[...] = (dy * xhat).sum(axis=0)
        self.dbeta[...] = dy.sum(axis=0)
        dxhat = dy * self.gamma
        if not training:
            return dxhat * inv_std
        # gradient through the batch mean and variance
        n = dy.shape[0]
        return inv_std / n * (n * dxhat - dxhat.sum(axis=0) - xhat * (dxhat * xhat).sum(axis=0))


class LeakyReLU:
    has_state = False
    param_shapes: list = []

    def __init__(self, slope: float = 0.01):
        self.slope = slope
        self._mask = None

    def bind(self, params, grads):
        pass

    def initialize(self, rng):
        pass

    def forward(self, x, training):
        self._mask = x > 0
        return np.where(self._mask, x, self.slope * x)

    def backward(self, dy):
        if self._mask is None:
            raise CallOrder("LeakyReLU.backward before forward")
        return np.where(self._mask, dy, self.slope * dy)


class MlpNetwork:
    """Feed-forward stack: ``[Dense -> BatchNorm -> LeakyReLU] * len(hidden) -> Dense``.

    Parameters
    ----------
    input_dim, output_dim
        Feature widths at both ends.
    hidden_widths
        Width of each hidden block; empty gives a single affine layer.
    batch_norm
        Insert batch normalization after every hidden dense layer.
    """

    def __init__(self, input_dim: int, output_dim: int, hidden_widths: Sequence[int] = (512,) * 4,
                 *, batch_norm: bool = True, leaky_slope: float = 0.01,
                 bn_momentum: float = 0.99, bn_epsilon: float = 1e-5,
                 rng: np.random.Generator | None = None):
        self.input_dim = input_dim
        self.output_dim = output_dim
        self.hidden_widths = tuple(int(w) for w in hidden_widths)
        self.batch_norm = batch_norm
        self.leaky_slope = leaky_slope
        self.layers = []
        width = input_dim
        for h in self.hidden_widths:
            self.layers.append(Dense(width, h))
            if batch_norm:
                self.layers.append(BatchNorm(h, bn_momentum, bn_epsilon))
            self.layers.append(LeakyReLU(leaky_slope))
            width = h
        self.layers.append(Dense(width, output_dim))

        shapes = [s for layer in self.layers for s in layer.param_shapes]
        sizes = [int(np.prod(s)) for s in shapes]
        self.params = np.zeros(sum(sizes))
        self.grads = np.zeros_like(self.params)
        self.l2_mask = np.zeros(self.params.size, dtype=bool)
        offset = 0
        for layer in self.layers:
            pviews, gviews = [], []
            for i, shape in enumerate(layer.param_shapes):
                size = int(np.prod(shape))
                pviews.append(self.params[offset:offset + size].reshape(shape))
                gviews.append(self.grads[offset:offset + size].reshape(shape))
                if isinstance(layer, Dense) and i == 0:
                    self.l2_mask[offset:offset + size] = True
                offset += size
            layer.bind(pviews, gviews)
        self._forward_done = False
        self.initialize(rng if rng is not None else np.random.default_rng(0))

    def initialize(self, rng: np.random.Generator) -> None:
        for layer in self.layers:
            layer.initialize(rng)

    @property
    def norm_layers(self) -> list:
        return [layer for layer in self.layers if isinstance(layer, BatchNorm)]

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ValueError(f"expected input of shape (B, {self.input_dim}), got {x.shape}")
        for layer in self.layers:
            x = layer.forward(x, training)
        self._forward_done = True
        return x

    __call__ = forward

    def backward(self, upstream: np.ndarray) -> np.ndarray:
        """Fill ``grads`` with d(loss)/d(params); return d(loss)/d(input).

        ``upstream`` is d(loss)/d(output) for the batch of the latest forward.
        """
        if not self._forward_done:
            raise CallOrder("backward called without a matching forward")
        dy = np.asarray(upstream, dtype=float)
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy

    def l2_norm_sq(self) -> float:
        w = self.params[self.l2_mask]
        return float(w @ w)

    def running_stats(self) -> np.ndarray:
        """All batch-norm running means and variances as one flat vector."""
        parts = [np.concatenate([bn.running_mean, bn.running_var]) for bn in self.norm_layers]
        return np.concatenate(parts) if parts else np.zeros(0)

    def set_running_stats(self, flat: np.ndarray) -> None:
        offset = 0
        for bn in self.norm_layers:
            w = bn.width
            bn.running_mean[...] = flat[offset:offset + w]
            bn.running_var[...] = flat[offset + w:offset + 2 * w]
            offset += 2 * w
        if offset != flat.size:
            raise ValueError("running-stat vector does not match network layout")

    def architecture(self) -> dict:
        bn = self.norm_layers
        return {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "hidden_widths": list(self.hidden_widths),
            "batch_norm": self.batch_norm,
            "leaky_slope": self.leaky_slope,
            "bn_momentum": bn[0].momentum if bn else 0.99,
            "bn_epsilon": bn[0].epsilon if bn else 1e-5,
        }

    @classmethod
    def from_architecture(cls, arch: dict) -> "MlpNetwork":
        arch = dict(arch)
        return cls(arch.pop("input_dim"), arch.pop("output_dim"), arch.pop("hidden_widths"), **arch)

    def copy(self) -> "MlpNetwork":
        net = MlpNetwork.from_architecture(self.architecture())
        net.params[...] = self.params
        net.set_running_stats(self.running_stats())
        return net
