"""Student encoder: token embedding + sinusoidal positions, then per layer
multi-head self-attention and a ReLU feed-forward block, each wrapped in a
post-norm residual (x <- LayerNorm(x + sublayer(x))).

The forward pass is built once as an autograd graph; inference wraps the
parameters as constants and training wraps them as differentiable tensors,
so the two paths cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from ..errors import (ConfigError, LengthError, NonFiniteError, ShapeError,
                      TokenRangeError)


@dataclass
class StudentConfig:
    vocab_size: int
    d_model: int = 256
    n_layers: int = 3
    n_heads: int = 16
    d_ff: int = 1024
    max_len: int = 128
    dropout_rate: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        for name in ("vocab_size", "d_model", "n_layers", "n_heads", "d_ff",
                     "max_len"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.d_model % self.n_heads:
            raise ConfigError(
                f"d_model={self.d_model} not divisible by n_heads={self.n_heads}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ConfigError(f"dropout_rate={self.dropout_rate} not in [0, 1)")


class GradientSet(dict):
    """name -> gradient array, shape-congruent with a parameter set."""

    def check_congruent(self, params: "StudentParams") -> None:
        for name, arr in params.tensors.items():
            if name not in self or self[name].shape != arr.shape:
                raise ShapeError(f"gradient set not congruent at {name!r}")


@dataclass
class StudentParams:
    cfg: StudentConfig
    tensors: dict[str, np.ndarray]  # trainable, in declaration order
    positional_encoding: np.ndarray = field(repr=False, default=None)

    def copy(self) -> "StudentParams":
        return StudentParams(cfg=self.cfg,
                             tensors={k: v.copy() for k, v in self.tensors.items()},
                             positional_encoding=self.positional_encoding.copy())

    def checksum(self) -> str:
        import hashlib
        h = hashlib.sha256()
        for name in self.tensors:
            h.update(name.encode())
            h.update(np.ascontiguousarray(self.tensors[name]).tobytes())
        return h.hexdigest()


def sinusoidal_encoding(max_len: int, d_model: int) -> np.ndarray:
    pos = np.arange(max_len)[:, None].astype(np.float64)
    idx = np.arange(0, d_model, 2).astype(np.float64)
    div = np.exp(-np.log(10000.0) * idx / d_model)
    pe = np.zeros((max_len, d_model))
    pe[:, 0::2] = np.sin(pos * div)
    pe[:, 1::2] = np.cos(pos * div[: pe[:, 1::2].shape[1]])
    return pe


def _xavier(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


def tensor_layout(cfg: StudentConfig) -> list[tuple[str, tuple]]:
    """Declaration order of every trainable tensor and its shape."""
    d, f = cfg.d_model, cfg.d_ff
    layout = [("token_embedding", (cfg.vocab_size, d))]
    for i in range(cfg.n_layers):
        p = f"layer{i}."
        layout += [
            (p + "w_q", (d, d)), (p + "w_k", (d, d)), (p + "w_v", (d, d)),
            (p + "w_o", (d, d)),
            (p + "ffn_w1", (d, f)), (p + "ffn_b1", (f,)),
            (p + "ffn_w2", (f, d)), (p + "ffn_b2", (d,)),
            (p + "ln1_gamma", (d,)), (p + "ln1_beta", (d,)),
            (p + "ln2_gamma", (d,)), (p + "ln2_beta", (d,)),
        ]
    return layout


def init_student(cfg: StudentConfig) -> StudentParams:
    """Xavier-uniform weights, zero biases, unit layer-norm scales;
    deterministic for a fixed seed."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    tensors: dict[str, np.ndarray] = {}
    for name, shape in tensor_layout(cfg):
        short = name.split(".")[-1]
        if short.startswith(("ffn_b",)) or short.endswith("_beta"):
            tensors[name] = np.zeros(shape)
        elif short.endswith("_gamma"):
            tensors[name] = np.ones(shape)
        else:
            tensors[name] = _xavier(rng, shape)
    return StudentParams(cfg=cfg, tensors=tensors,
                         positional_encoding=sinusoidal_encoding(
                             cfg.max_len, cfg.d_model))


def param_count(cfg: StudentConfig) -> int:
    return sum(int(np.prod(shape)) for _, shape in tensor_layout(cfg))


# ------------------------------------------------------------- forward graph

def build_forward(tensors: dict[str, ag.Tensor], pe: np.ndarray,
                  token_ids: np.ndarray, cfg: StudentConfig,
                  dropout_rng: np.random.Generator | None = None) -> ag.Tensor:
    """Assemble the forward graph over (possibly differentiable) tensors."""
    n = len(token_ids)
    x = ag.add(ag.gather_rows(tensors["token_embedding"], token_ids),
               ag.const(pe[:n]))
    rate = cfg.dropout_rate if dropout_rng is not None else 0.0
    for i in range(cfg.n_layers):
        p = f"layer{i}."
        q = ag.matmul(x, tensors[p + "w_q"])
        k = ag.matmul(x, tensors[p + "w_k"])
        v = ag.matmul(x, tensors[p + "w_v"])
        heads = ag.mha_core(q, k, v, cfg.n_heads)
        att = ag.matmul(heads, tensors[p + "w_o"])
        if rate > 0.0:
            att = ag.dropout(att, rate, dropout_rng)
        x = ag.layer_norm(ag.add(x, att),
                          tensors[p + "ln1_gamma"], tensors[p + "ln1_beta"])
        h = ag.relu(ag.add(ag.matmul(x, tensors[p + "ffn_w1"]),
                           tensors[p + "ffn_b1"]))
        f = ag.add(ag.matmul(h, tensors[p + "ffn_w2"]), tensors[p + "ffn_b2"])
        if rate > 0.0:
            f = ag.dropout(f, rate, dropout_rng)
        x = ag.layer_norm(ag.add(x, f),
                          tensors[p + "ln2_gamma"], tensors[p + "ln2_beta"])
    return x


def _check_ids(params: StudentParams, token_ids) -> np.ndarray:
    ids = np.asarray(token_ids, dtype=np.intp)
    if ids.ndim != 1 or ids.size == 0:
        raise LengthError(f"token_ids must be a non-empty 1-D sequence, got "
                          f"shape {ids.shape}")
    if ids.size > params.cfg.max_len:
        raise LengthError(f"sequence length {ids.size} exceeds "
                          f"max_len {params.cfg.max_len}")
    if ids.min() < 0 or ids.max() >= params.cfg.vocab_size:
        raise TokenRangeError(
            f"token id out of range [0, {params.cfg.vocab_size})")
    return ids


def student_forward(params: StudentParams, token_ids,
                    dtype=np.float64) -> np.ndarray:
    """Hidden states (n x d_model) for one problem; dropout disabled."""
    ids = _check_ids(params, token_ids)
    consts = {k: ag.const(v.astype(dtype)) for k, v in params.tensors.items()}
    out = build_forward(consts, params.positional_encoding.astype(dtype),
                        ids, params.cfg)
    return out.data


def student_backward(params: StudentParams, batch, loss_head,
                     dropout_rng: np.random.Generator | None = None
                     ) -> tuple[float, GradientSet]:
    """Exact gradients of a scalar loss over a batch of problems.

    loss_head(hidden, item) must return a pair (sum_of_squared_or_logloss
    Tensor, element_count); the batch loss is total / count so per-token
    losses mask out nothing that was not passed in.
    """
    lifted = {k: ag.param(v, name=k) for k, v in params.tensors.items()}
    total: ag.Tensor | None = None
    count = 0
    for item in batch:
        ids = _check_ids(params, item.token_ids)
        hidden = build_forward(lifted, params.positional_encoding, ids,
                               params.cfg, dropout_rng)
        part, c = loss_head(hidden, item)
        total = part if total is None else ag.add(total, part)
        count += c
    if total is None:
        raise ShapeError("empty batch")
    loss = ag.scale(total, 1.0 / count)
    ag.backward(loss)

    grads = GradientSet()
    for name, t in lifted.items():
        g = t.grad if t.grad is not None else np.zeros_like(t.data)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient in {name!r}")
        grads[name] = g
    value = float(loss.data)
    if not np.isfinite(value):
        raise NonFiniteError("non-finite loss value")
    return value, grads


# ------------------------------------------------------- standalone operations

def scaled_dot_attention(Q: np.ndarray, K: np.ndarray,
                         V: np.ndarray) -> np.ndarray:
    """softmax(Q K^T / sqrt(d_k)) V with max-subtracted softmax."""
    Q, K, V = (np.asarray(M, dtype=np.float64) for M in (Q, K, V))
    if Q.shape != K.shape or K.shape != V.shape or Q.ndim != 2:
        raise ShapeError(f"Q/K/V shapes differ: {Q.shape}, {K.shape}, {V.shape}")
    if Q.shape[1] < 1:
        raise ShapeError("d_k must be >= 1")
    return ag.mha_core(ag.const(Q), ag.const(K), ag.const(V), 1).data


def multi_head_attention(X: np.ndarray, w_q, w_k, w_v, w_o,
                         n_heads: int) -> np.ndarray:
    """Project, attend per head over column blocks, concatenate, project."""
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[1]
    for name, W in (("w_q", w_q), ("w_k", w_k), ("w_v", w_v), ("w_o", w_o)):
        if np.shape(W) != (d, d):
            raise ShapeError(f"{name} must be ({d}, {d}), got {np.shape(W)}")
    if d % n_heads:
        raise ShapeError(f"d_model={d} not divisible by n_heads={n_heads}")
    x = ag.const(X)
    heads = ag.mha_core(ag.matmul(x, ag.const(w_q)),
                        ag.matmul(x, ag.const(w_k)),
                        ag.matmul(x, ag.const(w_v)), n_heads)
    return ag.matmul(heads, ag.const(w_o)).data


def ffn(X: np.ndarray, w1, b1, w2, b2) -> np.ndarray:
    """max(0, X w1 + b1) w2 + b2, row-wise."""
    X = np.asarray(X, dtype=np.float64)
    w1, b1, w2, b2 = (np.asarray(a, dtype=np.float64) for a in (w1, b1, w2, b2))
    if X.ndim != 2 or w1.shape[0] != X.shape[1] or w1.shape[1] != b1.shape[0] \
            or w2.shape[0] != w1.shape[1] or w2.shape[1] != b2.shape[0]:
        raise ShapeError("ffn shapes are not congruent")
    return np.maximum(X @ w1 + b1, 0.0) @ w2 + b2
