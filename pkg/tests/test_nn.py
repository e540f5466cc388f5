import numpy as np
import pytest

import ltlcraft.nn as nn
from ltlcraft.nn import (
    Adam, DenseNetwork, QPair, backward, ddqn_step, ddqn_target, forward, load_network, mse_step,
    optimize_step, q_network, save_network,
)


def reference_forward(net, x):
    # independent straight-line version: explicit loops over units
    h = list(np.asarray(x, dtype=float))
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        out = []
        for j in range(w.shape[1]):
            z = b[j] + sum(h[i] * w[i, j] for i in range(w.shape[0]))
            out.append(z if layer == len(net.weights) - 1 else max(z, 0.0))
        h = out
    return np.array(h)


def random_net(rng):
    depth = int(rng.integers(1, 4))
    sizes = [int(rng.integers(1, 7))] + [int(rng.integers(2, 9)) for _ in range(depth)] + [int(rng.integers(1, 5))]
    return DenseNetwork(sizes, rng=rng)


def numeric_grad(net, x, c, h=1e-5):
    g = np.empty_like(net.params)
    for k in range(len(net.params)):
        old = net.params[k]
        net.params[k] = old + h
        up = c @ net.forward(x)
        net.params[k] = old - h
        down = c @ net.forward(x)
        net.params[k] = old
        g[k] = (up - down) / (2 * h)
    return g


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def test_forward_examples():
    net = DenseNetwork((3, 4, 2), params=np.zeros(3 * 4 + 4 + 4 * 2 + 2))
    assert forward(net, [1.0, -2.0, 3.0]).tolist() == [0.0, 0.0]
    one = DenseNetwork((1, 1), params=[2.0, 1.0])
    assert forward(one, [3.0]).tolist() == [7.0]


def test_forward_matches_reference():
    rng = np.random.default_rng(0)
    for _ in range(50):
        net = random_net(rng)
        x = rng.normal(size=net.n_inputs)
        np.testing.assert_allclose(net.forward(x), reference_forward(net, x), atol=1e-12, rtol=0)
        batch = rng.normal(size=(5, net.n_inputs))
        np.testing.assert_allclose(net.forward(batch)[2], net.forward(batch[2]), atol=1e-12, rtol=0)


def test_shape_errors():
    net = q_network(3, 2, rng=0)
    with pytest.raises(ValueError):
        net.forward(np.zeros(4))
    with pytest.raises(ValueError):
        backward(net, np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        DenseNetwork((3, 2), params=np.zeros(5))
    with pytest.raises(ValueError):
        DenseNetwork((3,))


def test_default_architecture():
    net = q_network(10, 4, rng=1)
    assert net.sizes == (10, 64, 64, 4)


def test_zero_upstream_gradient():
    net = q_network(3, 2, rng=0)
    assert not backward(net, np.ones(3), np.zeros(2)).any()


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        net = random_net(rng)
        x = rng.normal(size=net.n_inputs)
        c = rng.normal(size=net.n_outputs)
        worst = max(worst, relative_error(backward(net, x, c), numeric_grad(net, x, c)))
    assert worst < 1e-4


def test_batched_gradient_is_sum_of_single():
    rng = np.random.default_rng(2)
    net = random_net(rng)
    xs = rng.normal(size=(4, net.n_inputs))
    gs = rng.normal(size=(4, net.n_outputs))
    total = sum(backward(net, xs[i], gs[i]) for i in range(4))
    np.testing.assert_allclose(backward(net, xs, gs), total, atol=1e-12)


def test_dead_relu_blocks_gradient():
    # hidden unit 0 has a negative pre-activation for x = 1
    params = np.array([-1.0, 1.0, 0.0, 0.0, 5.0, 7.0, 0.0])
    net = DenseNetwork((1, 2, 1), params=params)
    g = backward(net, [1.0], [1.0])
    w1, b1, w2, b2 = g[0:2], g[2:4], g[4:6], g[6]
    assert w1[0] == 0 and b1[0] == 0 and w2[0] == 0
    assert w1[1] == 7 and b1[1] == 7 and w2[1] == 1 and b2 == 1


def test_adam_zero_gradient_is_fixed_point():
    p = np.array([1.0, -2.0])
    opt = Adam(2)
    opt.step(p, np.zeros(2))
    assert p.tolist() == [1.0, -2.0] and opt.t == 1


def test_adam_first_step_moves_by_lr():
    p = np.array([0.3])
    opt = Adam(1, lr=5e-4)
    opt.step(p, np.array([1.0]))
    assert p[0] == pytest.approx(0.3 - 5e-4, abs=1e-10)


def test_adam_matches_textbook_update():
    rng = np.random.default_rng(3)
    p = rng.normal(size=5)
    q = p.copy()
    opt = Adam(5, lr=1e-2)
    m = v = np.zeros(5)
    for t in range(1, 30):
        g = rng.normal(size=5)
        opt.step(p, g)
        m = 0.9 * m + 0.1 * g
        v = 0.999 * v + 0.001 * g * g
        q = q - 1e-2 * (m / (1 - 0.9 ** t)) / (np.sqrt(v / (1 - 0.999 ** t)) + 1e-8)
    np.testing.assert_allclose(p, q, atol=1e-12)


def test_adam_rejects_non_finite():
    opt = Adam(2)
    with pytest.raises(FloatingPointError):
        opt.step(np.zeros(2), np.array([np.nan, 0.0]))
    with pytest.raises(ValueError):
        opt.step(np.zeros(3), np.zeros(3))


def test_adam_reduces_quadratic_loss():
    rng = np.random.default_rng(4)
    net = q_network(3, 2, rng=4, hidden=(8,))
    x = rng.normal(size=(16, 3))
    y = rng.normal(size=(16, 2))
    opt = Adam(len(net.params), lr=1e-2)

    def loss():
        return float(np.mean((net.forward(x) - y) ** 2))

    start = loss()
    for _ in range(200):
        _, cache = net.forward_cached(x)
        grad = net.backward(cache, 2 * (net.forward(x) - y) / y.size)
        optimize_step(net, opt, grad)
    assert loss() < start


def test_ddqn_target_examples():
    net = DenseNetwork((1, 3), params=[0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
    pair = QPair(net)
    assert ddqn_target(pair, 1.0, [1.0], 0.9, True) == 1.0
    pair.target.params[:] = [0.0, 0.0, 0.0, 0.0, 0.0, 2.0]
    assert ddqn_target(pair, 0.0, [1.0], 0.9, False) == pytest.approx(1.8)


def test_ddqn_target_collapses_to_max_when_equal():
    rng = np.random.default_rng(5)
    pair = QPair(q_network(4, 3, rng=5))
    s2 = rng.normal(size=(8, 4))
    y = ddqn_target(pair, np.zeros(8), s2, 0.9, np.zeros(8))
    np.testing.assert_allclose(y, 0.9 * pair.online.forward(s2).max(axis=1), atol=1e-15)


def test_ddqn_target_mask():
    net = DenseNetwork((1, 3), params=[0.0, 0.0, 5.0, 1.0, 2.0, 3.0])
    pair = QPair(net)
    mask = np.array([[True, True, False]])
    y = ddqn_target(pair, np.zeros(1), np.array([[1.0]]), 1.0, np.zeros(1), mask)
    assert y.tolist() == [2.0]


def test_sync_is_exact_and_idempotent():
    pair = QPair(q_network(3, 2, rng=6))
    pair.online.params += 1.0
    pair.sync()
    once = pair.target.params.copy()
    pair.sync()
    assert np.array_equal(pair.target.params, pair.online.params)
    assert np.array_equal(pair.target.params, once)
    assert pair.target.params is not pair.online.params


def _batch(rng, n_in, n_out, n=32):
    return dict(
        s=rng.normal(size=(n, n_in)), a=rng.integers(0, n_out, n), r=rng.normal(size=n),
        s_next=rng.normal(size=(n, n_in)), terminal=(rng.random(n) < 0.3).astype(float),
        mask=rng.random((n, n_out)) < 0.7,
    )


@pytest.mark.parametrize("use_mask", [False, True])
def test_fused_step_matches_two_call_reference(use_mask):
    rng = np.random.default_rng(7)
    a = QPair(q_network(10, 4, rng=7))
    a.target.params += rng.normal(scale=0.1, size=a.target.params.shape)
    b = QPair(a.online.copy())
    b.target.params[...] = a.target.params
    oa, ob = Adam(len(a.online.params)), Adam(len(b.online.params))
    for _ in range(20):
        bt = _batch(rng, 10, 4)
        mask = bt["mask"] if use_mask else None
        if mask is not None:
            mask[:, 0] = True  # at least one admissible choice per row
        la = ddqn_step(a, oa, bt["s"], bt["a"], bt["r"], bt["s_next"], 0.9, bt["terminal"], mask)
        y = ddqn_target(b, bt["r"], bt["s_next"], 0.9, bt["terminal"], mask)
        lb = mse_step(b, ob, bt["s"], bt["a"], y)
        assert la == pytest.approx(lb, rel=1e-12, abs=1e-15)
    np.testing.assert_allclose(a.online.params, b.online.params, atol=1e-12, rtol=0)
    assert oa.t == ob.t == 20


def test_numpy_path_matches_reference(monkeypatch):
    monkeypatch.setattr(nn, "_fused", None)
    test_fused_step_matches_two_call_reference(True)


def test_frozen_transition_converges():
    pair = QPair(q_network(4, 3, rng=8))
    opt = Adam(len(pair.online.params), lr=5e-3)
    s = np.tile([[0.5, -1.0, 0.2, 1.0]], (32, 1))
    for _ in range(1500):
        ddqn_step(pair, opt, s, np.full(32, 2), np.ones(32), s, 0.9, np.ones(32))
    assert pair.online.forward(s[0])[2] == pytest.approx(1.0, abs=1e-2)


def test_checkpoint_roundtrip(tmp_path):
    net = q_network(5, 3, rng=9)
    save_network(net, tmp_path / "n.npz")
    back = load_network(tmp_path / "n.npz")
    x = np.linspace(-1, 1, 5)
    assert back.sizes == net.sizes
    assert np.array_equal(back.forward(x), net.forward(x))
