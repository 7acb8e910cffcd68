"""Per-token part-of-speech head: a linear map into the 12-tag simplex."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import autograd as ag
from ..errors import ShapeError

N_TAGS = 12


@dataclass
class PosHeadParams:
    w_p: np.ndarray  # (12, d)
    b_p: np.ndarray  # (12,)

    @property
    def dim(self) -> int:
        return self.w_p.shape[1]

    def tensors(self) -> dict[str, np.ndarray]:
        return {"pos.w_p": self.w_p, "pos.b_p": self.b_p}

    def update_from(self, named: dict[str, np.ndarray]) -> None:
        self.w_p = named["pos.w_p"]
        self.b_p = named["pos.b_p"]


def init_pos_head(d: int, seed: int = 0) -> PosHeadParams:
    rng = np.random.default_rng(seed)
    limit = np.sqrt(6.0 / (N_TAGS + d))
    return PosHeadParams(w_p=rng.uniform(-limit, limit, size=(N_TAGS, d)),
                         b_p=np.zeros(N_TAGS))


def logits_graph(V: ag.Tensor, pt: dict[str, ag.Tensor]) -> ag.Tensor:
    return ag.add(ag.matmul(V, ag.transpose(pt["pos.w_p"])), pt["pos.b_p"])


def pos_predict(V: np.ndarray, params: PosHeadParams) -> np.ndarray:
    """Per-token distribution over the 12 tags; rows sum to 1. The predicted
    tag is the argmax with ties to the lower tag index."""
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] != params.dim:
        raise ShapeError(f"vectors have shape {V.shape}, head expects "
                         f"(*, {params.dim})")
    pt = {k: ag.const(v) for k, v in params.tensors().items()}
    return ag.softmax_rows(logits_graph(ag.const(V), pt)).data
