"""t-SNE restricted to 2-D diagnostics.

Per-point bandwidths come from a binary search matching the target entropy
log(perplexity) within 1e-4; optimization is gradient descent with the usual
momentum schedule (0.5, then 0.8 after iteration 250), per-coordinate gain
adaptation, and early exaggeration of 12 for the first 250 iterations.
Deterministic given the seed. Fit-only: there is no out-of-sample rule.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParamError
from ..kernels import pairwise_sq_dists, tsne_cond_probs, tsne_kl_grad
from .projection import Projection

EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
MOMENTUM_SWITCH = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
ENTROPY_TOL = 1e-4


def fit_tsne2d(X: np.ndarray, perplexity: float, iters: int, seed: int,
               learning_rate: float = 200.0) -> Projection:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParamError(f"expected 2-D data, got shape {X.shape}")
    n, d = X.shape
    if not (0 < perplexity < n):
        raise ParamError(f"perplexity={perplexity} must be in (0, n={n})")
    if iters < 1:
        raise ParamError(f"iters={iters} must be >= 1")

    D2 = pairwise_sq_dists(X)
    P_cond, _betas = tsne_cond_probs(D2, np.log(perplexity), ENTROPY_TOL)
    P = (P_cond + P_cond.T) / (2.0 * n)
    P = np.maximum(P, 1e-12)

    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n, 2)) * 1e-4
    inc = np.zeros_like(Y)
    gains = np.ones_like(Y)
    for t in range(iters):
        Pt = P * EXAGGERATION if t < EXAGGERATION_ITERS else P
        grad = tsne_kl_grad(Pt, Y)
        momentum = INITIAL_MOMENTUM if t < MOMENTUM_SWITCH else FINAL_MOMENTUM
        same_sign = np.sign(grad) == np.sign(inc)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        inc = momentum * inc - learning_rate * gains * grad
        Y = Y + inc
        Y = Y - Y.mean(axis=0)

    return Projection(method="TSNE2D", in_dim=d, out_dim=2,
                      fitted_embedding=Y)
