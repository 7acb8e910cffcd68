"""Finite-difference checks of every autograd primitive; the engine is the
foundation for every training path, so each op gets its own gradient test."""

import numpy as np

import mwpkd.autograd as ag
from conftest import central_fd


def _grad_of(build, x0):
    """Analytic gradient of scalar build(tensor) wrt a flat parameter x0."""
    t = ag.param(x0.copy())
    loss = build(t)
    ag.backward(loss)
    return loss.data, t.grad


def _check(build, x0, h=1e-6, tol=1e-6):
    _, g = _grad_of(build, x0)
    fd = central_fd(lambda x: float(build(ag.const(x)).data), x0, h=h)
    assert np.allclose(g.ravel(), fd.ravel(), rtol=1e-4, atol=tol), \
        f"analytic {g.ravel()[:4]} vs fd {fd.ravel()[:4]}"


def test_add_mul_sub_broadcast(rng):
    b = rng.standard_normal((3, 4))
    v = rng.standard_normal(4)

    def build(t):
        m = ag.mul(ag.add(ag.const(b), t), ag.const(b))
        return ag.sum_all(ag.sub(m, t))

    # t broadcasts as a row vector
    x0 = rng.standard_normal(4)
    t = ag.param(x0)
    loss = build(t)
    ag.backward(loss)
    fd = central_fd(lambda x: float(build(ag.const(x)).data), x0)
    assert np.allclose(t.grad, fd, rtol=1e-5, atol=1e-7)
    assert v.shape == (4,)


def test_matmul_all_arities(rng):
    A = rng.standard_normal((3, 4))
    B = rng.standard_normal((4, 2))
    u = rng.standard_normal(3)
    w = rng.standard_normal(4)

    # 2-D x 2-D
    _check(lambda t: ag.sum_all(ag.matmul(t, ag.const(B))), A)
    assert B.shape == (4, 2)
    # 2-D x 1-D
    _check(lambda t: ag.sum_all(ag.matmul(ag.const(A), t)), w)
    # 1-D x 2-D
    _check(lambda t: ag.sum_all(ag.matmul(t, ag.const(A))), u)
    # 1-D x 1-D
    _check(lambda t: ag.matmul(t, ag.const(w)), w + 1.0)


def test_nonlinearities(rng):
    x = rng.standard_normal((5, 3))
    _check(lambda t: ag.sum_all(ag.tanh(t)), x)
    _check(lambda t: ag.sum_all(ag.sigmoid(t)), x)
    _check(lambda t: ag.sum_all(ag.mul(ag.relu(t), t)), x + 0.3)
    _check(lambda t: ag.sum_all(ag.softmax_rows(t)), x)
    _check(lambda t: ag.mean_all(ag.mul(ag.softmax_rows(t), t)), x)


def test_reductions_and_shaping(rng):
    x = rng.standard_normal((4, 3))
    _check(lambda t: ag.mean_all(t), x)
    _check(lambda t: ag.sum_all(ag.mean_rows(t)), x)
    _check(lambda t: ag.sum_all(ag.mul(ag.transpose(t), ag.const(x.T))), x)

    v = rng.standard_normal(6)
    tile_w = rng.standard_normal((5, 6))
    _check(lambda t: ag.sum_all(ag.mul(ag.concat_vec([t, t]),
                                       ag.const(np.arange(12.0)))), v)
    _check(lambda t: ag.sum_all(ag.mul(ag.tile_row(t, 5),
                                       ag.const(tile_w))), v)


def test_gather_and_stack(rng):
    table = rng.standard_normal((7, 4))
    idx = np.array([2, 2, 5, 0])
    weights = rng.standard_normal((4, 4))

    def build(t):
        return ag.sum_all(ag.mul(ag.gather_rows(t, idx), ag.const(weights)))

    t = ag.param(table.copy())
    loss = build(t)
    ag.backward(loss)
    fd = central_fd(lambda x: float(build(ag.const(x.reshape(7, 4))).data),
                    table.ravel()).reshape(7, 4)
    assert np.allclose(t.grad, fd, rtol=1e-5, atol=1e-7)

    v = rng.standard_normal(3)
    stack_w = rng.standard_normal((3, 3))
    _check(lambda t2: ag.sum_all(ag.mul(
        ag.stack_rows([t2, ag.const(v), t2]),
        ag.const(stack_w))), v)

    def scalar_stack(t2):
        parts = [ag.matmul(t2, ag.const(np.eye(3)[i])) for i in range(3)]
        return ag.sum_all(ag.mul(ag.stack_vec(parts), ag.const(np.array([1.0, -2.0, 3.0]))))
    _check(scalar_stack, v)


def test_rowwise_and_concat_ops(rng):
    x = rng.standard_normal((4, 3))
    y = rng.standard_normal((4, 2))
    w_cols = rng.standard_normal((4, 5))
    w_rows = rng.standard_normal((8, 3))
    _check(lambda t: ag.sum_all(ag.mul(ag.concat_cols(t, ag.const(y)),
                                       ag.const(w_cols))), x)
    _check(lambda t: ag.sum_all(ag.mul(ag.concat_rows(t, ag.const(x)),
                                       ag.const(w_rows))), x)
    _check(lambda t: ag.matmul(ag.row(t, 2), ag.const(np.array([1.0, 2.0, 3.0]))), x)


def test_layer_norm_grads(rng):
    x = rng.standard_normal((3, 6))
    gamma = rng.standard_normal(6) + 1.0
    beta = rng.standard_normal(6)
    w = rng.standard_normal((3, 6))

    def build_x(t):
        return ag.sum_all(ag.mul(ag.layer_norm(t, ag.const(gamma),
                                               ag.const(beta)), ag.const(w)))

    _check(build_x, x, h=1e-6)

    def build_gamma(t):
        return ag.sum_all(ag.mul(ag.layer_norm(ag.const(x), t,
                                               ag.const(beta)), ag.const(w)))

    _check(build_gamma, gamma)

    def build_beta(t):
        return ag.sum_all(ag.mul(ag.layer_norm(ag.const(x), ag.const(gamma),
                                               t), ag.const(w)))

    _check(build_beta, beta)


def test_mha_core_grads(rng):
    n, d, h = 4, 8, 2
    Q = rng.standard_normal((n, d))
    K = rng.standard_normal((n, d))
    V = rng.standard_normal((n, d))
    w = rng.standard_normal((n, d))

    for pick in range(3):
        mats = [Q, K, V]

        def build(t):
            args = [ag.const(m) for m in mats]
            args[pick] = t
            return ag.sum_all(ag.mul(ag.mha_core(*args, h), ag.const(w)))

        x0 = mats[pick]
        t = ag.param(x0.copy())
        loss = build(t)
        ag.backward(loss)
        fd = central_fd(lambda x: float(build(ag.const(x.reshape(n, d))).data),
                        x0.ravel()).reshape(n, d)
        assert np.allclose(t.grad, fd, rtol=1e-4, atol=1e-7), f"input {pick}"


def test_losses(rng):
    x = rng.standard_normal((4, 3))
    target = rng.standard_normal((4, 3))
    _check(lambda t: ag.mse_to(t, target), x)
    _check(lambda t: ag.scale(ag.sq_error_sum(t, target), 0.25), x)

    z = rng.standard_normal(5)
    labels = np.array([1.0, 0.0, 1.0, 1.0, 0.0])
    _check(lambda t: ag.bce_with_logits_vec(t, labels), z)

    logits = rng.standard_normal((4, 6))
    targets = np.array([1, 0, 5, 2])
    _check(lambda t: ag.cross_entropy_rows(t, targets), logits)


def test_grad_accumulation_through_shared_node(rng):
    x = rng.standard_normal(5)

    def build(t):
        y = ag.tanh(t)
        return ag.add(ag.sum_all(ag.mul(y, y)), ag.sum_all(y))

    _check(build, x)


def test_backward_requires_scalar():
    import pytest
    from mwpkd.errors import ShapeError
    t = ag.param(np.ones(3))
    with pytest.raises(ShapeError):
        ag.backward(ag.tanh(t))
