"""Small dense Q-networks, Adam, and Double-DQN targets in plain numpy.

All parameters of a network live in one flat float64 vector; per-layer
weight matrices and bias vectors are views into it. Optimizer state,
target-network syncs and checkpoints all work on that vector.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

try:
    from ._kernels import fused_ddqn_step as _fused
except ImportError:  # numba missing: fall back to plain numpy
    _fused = None

CHECKPOINT_VERSION = 1
HIDDEN = (64, 64)


class DenseNetwork:
    """Feedforward net: rectifier hidden layers, identity output layer.

    Weights are stored ``(fan_in, fan_out)`` so a layer computes ``x @ W + b``.
    """

    def __init__(self, sizes: Sequence[int], params: np.ndarray | None = None, rng=None):
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) < 2 or min(self.sizes) < 1:
            raise ValueError(f"bad layer sizes {sizes}")
        n = sum(a * b + b for a, b in zip(self.sizes[:-1], self.sizes[1:]))
        if params is None:
            params = self._init_params(n, rng)
        params = np.array(params, dtype=np.float64)
        if params.shape != (n,):
            raise ValueError(f"expected {n} parameters, got shape {params.shape}")
        self.params = params
        self.weights, self.biases = self._views(self.params)

    def _init_params(self, n, rng):
        # uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases alike
        rng = np.random.default_rng(rng)
        out = np.empty(n)
        o = 0
        for a, b in zip(self.sizes[:-1], self.sizes[1:]):
            k = a * b + b
            out[o:o + k] = rng.uniform(-1.0, 1.0, size=k) / np.sqrt(a)
            o += k
        return out

    def _views(self, flat: np.ndarray):
        weights, biases = [], []
        o = 0
        for a, b in zip(self.sizes[:-1], self.sizes[1:]):
            weights.append(flat[o:o + a * b].reshape(a, b))
            o += a * b
            biases.append(flat[o:o + b])
            o += b
        return weights, biases

    @property
    def n_inputs(self) -> int:
        return self.sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.sizes[-1]

    def copy(self) -> DenseNetwork:
        return DenseNetwork(self.sizes, self.params.copy())

    def _check(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_inputs or x.ndim not in (1, 2):
            raise ValueError(f"input shape {x.shape} does not match {self.n_inputs} inputs")
        return x

    def forward(self, x) -> np.ndarray:
        h = self._check(x)
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
        return h

    __call__ = forward

    def forward_cached(self, x):
        """Forward pass that also returns the layer inputs needed by ``backward``."""
        h = self._check(x)
        inputs = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
        return h, inputs

    def backward(self, cache, grad_out) -> np.ndarray:
        """Parameter gradient (flat, same layout as ``params``) of ``sum(grad_out * output)``."""
        inputs = cache
        g = np.asarray(grad_out, dtype=np.float64)
        batched = inputs[0].ndim == 2
        if g.shape[-1] != self.n_outputs or (g.ndim == 2) != batched:
            raise ValueError(f"output gradient shape {g.shape} does not match the network")
        grad = np.empty_like(self.params)
        gw, gb = self._views(grad)
        for i in range(len(self.weights) - 1, -1, -1):
            h = inputs[i]
            if batched:
                gw[i][...] = h.T @ g
                gb[i][...] = g.sum(axis=0)
            else:
                gw[i][...] = np.outer(h, g)
                gb[i][...] = g
            if i:
                # inputs[i] is relu output of layer i-1; zero where the unit was off
                g = (g @ self.weights[i].T) * (h > 0)
        return grad


def forward(net: DenseNetwork, x) -> np.ndarray:
    return net.forward(x)


def backward(net: DenseNetwork, x, grad_out) -> np.ndarray:
    _, cache = net.forward_cached(x)
    return net.backward(cache, grad_out)


def q_network(n_inputs: int, n_outputs: int, rng=None, hidden=HIDDEN) -> DenseNetwork:
    return DenseNetwork((n_inputs, *hidden, n_outputs), rng=rng)


class Adam:
    """Bias-corrected adaptive moment estimation over a flat parameter vector."""

    def __init__(self, n_params: int, lr=5e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self._tmp = np.zeros(n_params)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        if grad.shape != params.shape or self.m.shape != params.shape:
            raise ValueError("gradient / parameter / moment shapes differ")
        if not np.isfinite(grad).all():
            raise FloatingPointError("non-finite gradient")
        self.t += 1
        m, v, tmp = self.m, self.v, self._tmp
        np.subtract(grad, m, out=tmp)
        tmp *= 1 - self.beta1
        m += tmp
        np.multiply(grad, grad, out=tmp)
        tmp -= v
        tmp *= 1 - self.beta2
        v += tmp
        # lr * mhat / (sqrt(vhat) + eps), with both bias corrections folded into scalars
        c1 = 1 - self.beta1 ** self.t
        c2 = np.sqrt(1 - self.beta2 ** self.t)
        np.sqrt(v, out=tmp)
        tmp += self.eps * c2
        np.divide(m, tmp, out=tmp)
        tmp *= self.lr * c2 / c1
        params -= tmp


def optimize_step(net: DenseNetwork, opt: Adam, grad: np.ndarray) -> None:
    opt.step(net.params, grad)


class QPair:
    """Online network plus a periodically synced target copy."""

    def __init__(self, online: DenseNetwork, sync_period: int = 100):
        self.online = online
        self.target = online.copy()
        self.sync_period = sync_period

    def sync(self) -> None:
        self.target.params[...] = self.online.params


def ddqn_target(qpair: QPair, r, s_next, gamma: float, terminal, mask=None):
    """Double-DQN bootstrap: online net picks the action, target net scores it.

    Works on a single transition or on a batch (``s_next`` 2-D, ``r`` and
    ``terminal`` 1-D). ``mask`` (boolean, same shape as the Q output) limits
    the argmax to admissible choices.
    """
    s_next = np.asarray(s_next, dtype=np.float64)
    q_online = qpair.online.forward(s_next)
    q_target = qpair.target.forward(s_next)
    if mask is not None:
        q_online = np.where(mask, q_online, -np.inf)
    if s_next.ndim == 1:
        if terminal:
            return float(r)
        return float(r) + gamma * float(q_target[int(np.argmax(q_online))])
    best = np.argmax(q_online, axis=1)
    boot = q_target[np.arange(len(best)), best]
    return np.asarray(r, dtype=np.float64) + gamma * boot * (1.0 - np.asarray(terminal, dtype=np.float64))


def mse_step(qpair: QPair, opt: Adam, s, a, y) -> float:
    """One squared-error regression step of ``Q(s, a)`` towards targets ``y``."""
    net = qpair.online
    q, cache = net.forward_cached(s)
    idx = np.arange(len(a))
    err = q[idx, a] - y
    g = np.zeros_like(q)
    g[idx, a] = 2.0 * err / len(a)
    opt.step(net.params, net.backward(cache, g))
    return float(np.mean(err * err))


def ddqn_step(qpair: QPair, opt: Adam, s, a, r, s_next, gamma: float, terminal, mask=None) -> float:
    """``ddqn_target`` followed by ``mse_step`` on one minibatch; returns the loss.

    Uses the compiled kernel when numba is available, else the numpy path
    (one shared online pass over ``s`` and ``s_next``). Both agree with the
    two-call reference to rounding.
    """
    if _fused is not None:
        return _ddqn_step_fused(qpair, opt, s, a, r, s_next, gamma, terminal, mask)
    net = qpair.online
    n = len(a)
    q_both, cache = net.forward_cached(np.concatenate([s, s_next]))
    q_online = q_both[n:]
    if mask is not None:
        q_online = np.where(mask, q_online, -np.inf)
    idx = np.arange(n)
    boot = qpair.target.forward(s_next)[idx, np.argmax(q_online, axis=1)]
    y = r + gamma * boot * (1.0 - terminal)
    err = q_both[idx, a] - y
    g = np.zeros((n, net.n_outputs))
    g[idx, a] = (2.0 / n) * err
    opt.step(net.params, net.backward([h[:n] for h in cache], g))
    return float(err @ err) / n


def _ddqn_step_fused(qpair, opt, s, a, r, s_next, gamma, terminal, mask):
    net = qpair.online
    if mask is None:
        mask = np.ones((len(a), net.n_outputs), dtype=bool)
    opt.t += 1
    loss = _fused(
        net.params, qpair.target.params, opt.m, opt.v, np.asarray(net.sizes, dtype=np.int64),
        np.ascontiguousarray(s, dtype=np.float64), np.asarray(a, dtype=np.int64),
        np.asarray(r, dtype=np.float64), np.ascontiguousarray(s_next, dtype=np.float64),
        np.asarray(terminal, dtype=np.float64), np.asarray(mask, dtype=np.bool_),
        float(gamma), opt.lr, opt.beta1, opt.beta2, opt.eps, opt.t,
    )
    if np.isnan(loss):
        opt.t -= 1
        raise FloatingPointError("non-finite gradient")
    return loss


def save_network(net: DenseNetwork, path) -> None:
    np.savez(
        Path(path), version=np.array(CHECKPOINT_VERSION),
        sizes=np.array(net.sizes, dtype=np.int64), params=net.params,
    )


def load_network(path) -> DenseNetwork:
    with np.load(Path(path)) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        return DenseNetwork(data["sizes"].tolist(), data["params"])
