"""Minimal reverse-mode automatic differentiation over numpy arrays.

Training code wraps plain ndarrays in Tensors per step, builds the graph
forward, calls backward() on the scalar loss, and reads .grad back out.
Everything is deterministic: plain numpy ops, fixed traversal order. The op
set is exactly what the models here need; heavyweight pieces (multi-head
attention, layer norm, row softmax, losses) are fused primitives with
hand-written backward rules, which keeps graphs small and fast.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_vjp", "name")

    def __init__(self, data, requires_grad=False, parents=(), vjp=None, name=None):
        self.data = np.asarray(data)
        self.requires_grad = bool(requires_grad) or any(
            p.requires_grad for p in parents)
        self.grad = None
        self._parents = parents
        self._vjp = vjp
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, name={self.name})"


def param(data, name=None) -> Tensor:
    return Tensor(np.asarray(data), requires_grad=True, name=name)


def const(data) -> Tensor:
    return Tensor(np.asarray(data))


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, s in enumerate(shape):
        if s == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def _op(parents, data, vjp) -> Tensor:
    return Tensor(data, parents=tuple(parents), vjp=vjp)


# -- arithmetic -------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    return _op((a, b), a.data + b.data,
               lambda g: (_unbroadcast(g, a.data.shape),
                          _unbroadcast(g, b.data.shape)))


def sub(a: Tensor, b: Tensor) -> Tensor:
    return _op((a, b), a.data - b.data,
               lambda g: (_unbroadcast(g, a.data.shape),
                          _unbroadcast(-g, b.data.shape)))


def mul(a: Tensor, b: Tensor) -> Tensor:
    return _op((a, b), a.data * b.data,
               lambda g: (_unbroadcast(g * b.data, a.data.shape),
                          _unbroadcast(g * a.data, b.data.shape)))


def scale(a: Tensor, s: float) -> Tensor:
    s = float(s)
    return _op((a,), a.data * s, lambda g: (g * s,))


def matmul(a: Tensor, b: Tensor) -> Tensor:
    A, B = a.data, b.data
    if A.ndim == 1 and B.ndim == 1:
        def vjp(g):
            return (g * B, g * A)
    elif A.ndim == 2 and B.ndim == 1:
        def vjp(g):
            return (np.outer(g, B), A.T @ g)
    elif A.ndim == 1 and B.ndim == 2:
        def vjp(g):
            return (B @ g, np.outer(A, g))
    elif A.ndim == 2 and B.ndim == 2:
        def vjp(g):
            return (g @ B.T, A.T @ g)
    else:
        raise ShapeError(f"matmul on ndim {A.ndim} x {B.ndim}")
    return _op((a, b), A @ B, vjp)


def transpose(a: Tensor) -> Tensor:
    return _op((a,), a.data.T, lambda g: (g.T,))


# -- nonlinearities ---------------------------------------------------------

def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)
    return _op((a,), out, lambda g: (g * (1.0 - out * out),))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _op((a,), np.where(mask, a.data, 0.0), lambda g: (g * mask,))


def sigmoid(a: Tensor) -> Tensor:
    out = 1.0 / (1.0 + np.exp(-np.clip(a.data, -60.0, 60.0)))
    return _op((a,), out, lambda g: (g * out * (1.0 - out),))


def softmax_rows(a: Tensor) -> Tensor:
    """Softmax along the last axis with max-subtraction."""
    z = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=-1, keepdims=True)

    def vjp(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return _op((a,), out, vjp)


# -- reductions / reshaping -------------------------------------------------

def sum_all(a: Tensor) -> Tensor:
    return _op((a,), np.asarray(a.data.sum()),
               lambda g: (np.broadcast_to(g, a.data.shape).copy(),))


def mean_all(a: Tensor) -> Tensor:
    n = a.data.size
    return _op((a,), np.asarray(a.data.mean()),
               lambda g: (np.broadcast_to(g / n, a.data.shape).copy(),))


def mean_rows(a: Tensor) -> Tensor:
    """Column means of a 2-D tensor -> 1-D."""
    n = a.data.shape[0]
    return _op((a,), a.data.mean(axis=0),
               lambda g: (np.broadcast_to(g / n, a.data.shape).copy(),))


def concat_vec(parts: list[Tensor]) -> Tensor:
    sizes = [p.data.shape[0] for p in parts]
    offs = np.cumsum([0] + sizes)

    def vjp(g):
        return tuple(g[offs[i]:offs[i + 1]] for i in range(len(parts)))

    return _op(tuple(parts), np.concatenate([p.data for p in parts]), vjp)


def stack_rows(parts: list[Tensor]) -> Tensor:
    """Stack 1-D tensors of equal length into a 2-D tensor."""
    def vjp(g):
        return tuple(g[i] for i in range(len(parts)))

    return _op(tuple(parts), np.stack([p.data for p in parts], axis=0), vjp)


def stack_vec(parts: list[Tensor]) -> Tensor:
    """Stack scalar tensors into a 1-D tensor."""
    def vjp(g):
        return tuple(np.asarray(g[i]) for i in range(len(parts)))

    return _op(tuple(parts),
               np.array([float(p.data) for p in parts]), vjp)


def concat_cols(a: Tensor, b: Tensor) -> Tensor:
    na = a.data.shape[1]

    def vjp(g):
        return g[:, :na], g[:, na:]

    return _op((a, b), np.concatenate([a.data, b.data], axis=1), vjp)


def concat_rows(a: Tensor, b: Tensor) -> Tensor:
    na = a.data.shape[0]

    def vjp(g):
        return g[:na], g[na:]

    return _op((a, b), np.concatenate([a.data, b.data], axis=0), vjp)


def tile_row(v: Tensor, count: int) -> Tensor:
    """Repeat a 1-D tensor as the rows of a (count, len) tensor."""
    def vjp(g):
        return (g.sum(axis=0),)

    return _op((v,), np.tile(v.data, (count, 1)), vjp)


def row(a: Tensor, i: int) -> Tensor:
    def vjp(g):
        out = np.zeros_like(a.data)
        out[i] = g
        return (out,)

    return _op((a,), a.data[i], vjp)


def gather_rows(table: Tensor, idx) -> Tensor:
    idx = np.asarray(idx, dtype=np.intp)

    def vjp(g):
        out = np.zeros_like(table.data)
        np.add.at(out, idx, g)
        return (out,)

    return _op((table,), table.data[idx], vjp)


# -- fused model primitives --------------------------------------------------

def layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.data.mean(axis=-1, keepdims=True)
    var = ((x.data - mu) ** 2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out = xhat * gamma.data + beta.data

    def vjp(g):
        dgamma = (g * xhat).sum(axis=tuple(range(g.ndim - 1)))
        dbeta = g.sum(axis=tuple(range(g.ndim - 1)))
        dxhat = g * gamma.data
        m = dxhat.mean(axis=-1, keepdims=True)
        mx = (dxhat * xhat).mean(axis=-1, keepdims=True)
        dx = inv * (dxhat - m - xhat * mx)
        return dx, dgamma, dbeta

    return _op((x, gamma, beta), out, vjp)


def mha_core(q: Tensor, k: Tensor, v: Tensor, n_heads: int) -> Tensor:
    """Scaled dot-product attention over n_heads column blocks.

    q, k, v are (n, d) with d divisible by n_heads; returns the concatenated
    head outputs (n, d). The output projection is a separate matmul.
    """
    n, d = q.data.shape
    if d % n_heads:
        raise ShapeError(f"width {d} not divisible by {n_heads} heads")
    dk = d // n_heads
    scale_f = float(1.0 / np.sqrt(dk))  # python float: no float32 promotion

    def split(M):
        return M.reshape(n, n_heads, dk).transpose(1, 0, 2)

    Qh, Kh, Vh = split(q.data), split(k.data), split(v.data)
    S = (Qh @ Kh.transpose(0, 2, 1)) * scale_f
    S = S - S.max(axis=-1, keepdims=True)
    E = np.exp(S)
    A = E / E.sum(axis=-1, keepdims=True)
    O = A @ Vh
    out = O.transpose(1, 0, 2).reshape(n, d)

    def vjp(g):
        gO = g.reshape(n, n_heads, dk).transpose(1, 0, 2)
        dA = gO @ Vh.transpose(0, 2, 1)
        dVh = A.transpose(0, 2, 1) @ gO
        dS = A * (dA - (dA * A).sum(axis=-1, keepdims=True))
        dQh = (dS @ Kh) * scale_f
        dKh = (dS.transpose(0, 2, 1) @ Qh) * scale_f

        def join(Mh):
            return Mh.transpose(1, 0, 2).reshape(n, d)

        return join(dQh), join(dKh), join(dVh)

    return _op((q, k, v), out, vjp)


def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    if rate <= 0.0:
        return x
    keep = (rng.random(x.data.shape) >= rate)
    factor = 1.0 / (1.0 - rate)
    return _op((x,), np.where(keep, x.data * factor, 0.0),
               lambda g: (np.where(keep, g * factor, 0.0),))


# -- losses -------------------------------------------------------------------

def mse_to(pred: Tensor, target: np.ndarray) -> Tensor:
    """Mean squared error against a constant target, elementwise mean."""
    diff = pred.data - target
    n = diff.size
    return _op((pred,), np.asarray((diff ** 2).mean()),
               lambda g: (g * 2.0 * diff / n,))


def sq_error_sum(pred: Tensor, target: np.ndarray) -> Tensor:
    """Sum of squared errors against a constant target."""
    diff = pred.data - target
    return _op((pred,), np.asarray((diff ** 2).sum()),
               lambda g: (g * 2.0 * diff,))


def bce_with_logits(logit: Tensor, target: float) -> Tensor:
    """Binary cross-entropy from a scalar logit, numerically stable."""
    z = float(logit.data)
    t = float(target)
    val = max(z, 0.0) - z * t + np.log1p(np.exp(-abs(z)))
    sig = 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))
    return _op((logit,), np.asarray(val),
               lambda g: (np.full_like(logit.data, g * (sig - t)),))


def bce_with_logits_vec(logits: Tensor, targets) -> Tensor:
    """Mean binary cross-entropy of a 1-D logit vector against 0/1 targets."""
    t = np.asarray(targets, dtype=np.float64)
    z = logits.data
    val = np.maximum(z, 0.0) - z * t + np.log1p(np.exp(-np.abs(z)))
    sig = 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))
    n = z.shape[0]
    return _op((logits,), np.asarray(val.mean()),
               lambda g: (g * (sig - t) / n,))


def cross_entropy_rows(logits: Tensor, targets) -> Tensor:
    """Mean cross-entropy of 2-D logits against integer class targets."""
    targets = np.asarray(targets, dtype=np.intp)
    z = logits.data - logits.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=-1))
    ce = lse - z[np.arange(len(targets)), targets]
    n = len(targets)
    soft = np.exp(z) / np.exp(z).sum(axis=-1, keepdims=True)

    def vjp(g):
        d = soft.copy()
        d[np.arange(n), targets] -= 1.0
        return (g * d / n,)

    return _op((logits,), np.asarray(ce.mean()), vjp)


# -- engine -------------------------------------------------------------------

def backward(loss: Tensor) -> None:
    """Accumulate gradients of a scalar loss into every reachable tensor."""
    if loss.data.ndim != 0:
        raise ShapeError(f"backward() needs a scalar, got shape {loss.data.shape}")
    topo: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen or not node.requires_grad:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            stack.append((p, False))

    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._vjp is None or node.grad is None:
            continue
        grads = node._vjp(node.grad)
        for parent, g in zip(node._parents, grads):
            if g is None or not parent.requires_grad:
                continue
            g = np.asarray(g)
            if parent.grad is None:
                parent.grad = g.copy() if g.base is not None else g
            else:
                parent.grad = parent.grad + g
