"""Quantity-to-relation attention head.

Pools the quantity token vectors of a problem into a goal vector through an
attention score against the problem mean, then maps the goal vector to a
probability that an implicit relation is present.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autograd as ag
from ..errors import EmptyQuantityError, IndexRangeError, ShapeError


@dataclass
class QranParams:
    w_r: np.ndarray    # (h, 2d)
    alpha: np.ndarray  # (h,)
    w_c: np.ndarray    # (d,)
    beta_c: float

    @property
    def dim(self) -> int:
        return self.w_r.shape[1] // 2

    def tensors(self) -> dict[str, np.ndarray]:
        return {"qran.w_r": self.w_r, "qran.alpha": self.alpha,
                "qran.w_c": self.w_c,
                "qran.beta_c": np.asarray(float(self.beta_c))}

    def update_from(self, named: dict[str, np.ndarray]) -> None:
        self.w_r = named["qran.w_r"]
        self.alpha = named["qran.alpha"]
        self.w_c = named["qran.w_c"]
        self.beta_c = float(named["qran.beta_c"])


def init_qran(d: int, h: int | None = None, seed: int = 0) -> QranParams:
    """Hidden width defaults to d. The output map starts at zero so an
    untrained head predicts exactly 0.5."""
    h = d if h is None else h
    rng = np.random.default_rng(seed)
    limit = np.sqrt(6.0 / (h + 2 * d))
    return QranParams(
        w_r=rng.uniform(-limit, limit, size=(h, 2 * d)),
        alpha=rng.uniform(-np.sqrt(6.0 / (h + 1)), np.sqrt(6.0 / (h + 1)), size=h),
        w_c=np.zeros(d),
        beta_c=0.0)


def quantity_vectors(V: np.ndarray, quantity_indices) -> np.ndarray:
    """Rows of V at the quantity positions, original order preserved."""
    V = np.asarray(V)
    idx = list(quantity_indices)
    if not idx:
        raise EmptyQuantityError("problem exposes no quantity tokens")
    for i in idx:
        if not (0 <= i < V.shape[0]):
            raise IndexRangeError(f"quantity index {i} out of range "
                                  f"for {V.shape[0]} rows")
    return V[np.asarray(idx, dtype=np.intp)]


# The formulas live once, as graph builders; numpy inference wraps constants.

def goal_graph_from_quantities(V: ag.Tensor, N: ag.Tensor,
                               pt: dict[str, ag.Tensor]
                               ) -> tuple[ag.Tensor, ag.Tensor]:
    k = N.data.shape[0]
    vbar = ag.mean_rows(V)
    mus = []
    for i in range(k):
        cat = ag.concat_vec([vbar, ag.row(N, i)])
        mus.append(ag.matmul(pt["qran.alpha"],
                             ag.tanh(ag.matmul(pt["qran.w_r"], cat))))
    a = ag.softmax_rows(ag.stack_vec(mus))
    v_g = ag.matmul(a, N)
    return v_g, a


def goal_graph(V: ag.Tensor, quantity_indices,
               pt: dict[str, ag.Tensor]) -> tuple[ag.Tensor, ag.Tensor]:
    idx = list(quantity_indices)
    if not idx:
        raise EmptyQuantityError("problem exposes no quantity tokens")
    N = ag.gather_rows(V, np.asarray(idx, dtype=np.intp))
    return goal_graph_from_quantities(V, N, pt)


def logit_graph(v_g: ag.Tensor, pt: dict[str, ag.Tensor]) -> ag.Tensor:
    return ag.add(ag.matmul(pt["qran.w_c"], v_g), pt["qran.beta_c"])


def qran_goal_vector(V: np.ndarray, N: np.ndarray,
                     params: QranParams) -> tuple[np.ndarray, np.ndarray]:
    """Goal vector and attention weights over the quantity rows N (k x d)."""
    d = params.dim
    V = np.asarray(V, dtype=np.float64)
    N = np.asarray(N, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] != d:
        raise ShapeError(f"vectors have shape {V.shape}, head expects (*, {d})")
    if N.ndim != 2 or N.shape[1] != d or N.shape[0] < 1:
        raise ShapeError(f"quantity matrix has shape {N.shape}")
    pt = {k: ag.const(v) for k, v in params.tensors().items()}
    v_g, a = goal_graph_from_quantities(ag.const(V), ag.const(N), pt)
    return v_g.data, a.data


def qran_predict(v_g: np.ndarray, params: QranParams) -> float:
    """Probability that an implicit relation is present; decide at >= 0.5."""
    v_g = np.asarray(v_g, dtype=np.float64)
    if v_g.shape != (params.dim,):
        raise ShapeError(f"goal vector has shape {v_g.shape}, "
                         f"head expects ({params.dim},)")
    z = float(params.w_c @ v_g + params.beta_c)
    return float(1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0))))
