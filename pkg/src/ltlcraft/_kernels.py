"""Compiled fused Double-DQN update (forward, target, backward, Adam) for ``nn.ddqn_step``.

Mirrors the numpy code path in ``nn`` operation for operation; the tests
check that both give the same parameters.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _forward(params, sizes, x, keep):
    h = x
    inputs = []
    o = 0
    last = len(sizes) - 2
    for layer in range(last + 1):
        a, b = sizes[layer], sizes[layer + 1]
        w = params[o:o + a * b].reshape(a, b)
        o += a * b
        bias = params[o:o + b]
        o += b
        if keep:
            inputs.append(h)
        z = np.dot(h, w) + bias
        if layer < last:
            z = np.maximum(z, 0.0)
        h = z
    return h, inputs


@njit(cache=True)
def fused_ddqn_step(params, target, m, v, sizes, s, a, r, s_next, terminal, mask,
                    gamma, lr, beta1, beta2, eps, t):
    """Update ``params``, ``m`` and ``v`` in place; return the loss, or NaN (no update) on a
    non-finite gradient."""
    n = s.shape[0]
    x = np.empty((2 * n, s.shape[1]))
    x[:n] = s
    x[n:] = s_next
    q, inputs = _forward(params, sizes, x, True)
    q_target, _ = _forward(target, sizes, s_next, False)
    n_out = q.shape[1]
    g = np.zeros((n, n_out))
    loss = 0.0
    for i in range(n):
        best = -1
        for j in range(n_out):
            if mask[i, j] and (best < 0 or q[n + i, j] > q[n + i, best]):
                best = j
        y = r[i] + gamma * q_target[i, best] * (1.0 - terminal[i])
        err = q[i, a[i]] - y
        loss += err * err
        g[i, a[i]] = (2.0 / n) * err

    grad = np.empty_like(params)
    n_layers = len(sizes) - 1
    offsets = np.zeros(n_layers + 1, dtype=np.int64)
    for layer in range(n_layers):
        offsets[layer + 1] = offsets[layer] + sizes[layer] * sizes[layer + 1] + sizes[layer + 1]
    for layer in range(n_layers - 1, -1, -1):
        fan_in, fan_out = sizes[layer], sizes[layer + 1]
        h = np.ascontiguousarray(inputs[layer][:n])
        o = offsets[layer]
        grad[o:o + fan_in * fan_out] = np.dot(h.T, g).ravel()
        grad[o + fan_in * fan_out:o + fan_in * fan_out + fan_out] = g.sum(axis=0)
        if layer > 0:
            w = params[o:o + fan_in * fan_out].reshape(fan_in, fan_out)
            g = np.dot(g, w.T) * (h > 0)
    for k in range(grad.shape[0]):
        if not np.isfinite(grad[k]):
            return np.nan

    c1 = 1.0 - beta1 ** t
    c2 = np.sqrt(1.0 - beta2 ** t)
    scale = lr * c2 / c1
    eps_hat = eps * c2
    for k in range(params.shape[0]):
        gk = grad[k]
        m[k] += (1.0 - beta1) * (gk - m[k])
        v[k] += (1.0 - beta2) * (gk * gk - v[k])
        params[k] -= scale * m[k] / (np.sqrt(v[k]) + eps_hat)
    return loss / n
