"""Locally linear embedding: per-point reconstruction weights over nearest
neighbors, then the bottom eigenvectors of (I-W)^T (I-W)."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import NeighborError, NumericalError, ParamError
from ..kernels import pairwise_sq_dists
from .projection import (Projection, fix_signs_cols, knn_indices,
                         reconstruction_weights)


def fit_lle(X: np.ndarray, k: int, n_neighbors: int,
            reg: float = 1e-3) -> Projection:
    """Embed X (n x d) into k dimensions preserving local reconstructions.

    Weight rows sum to 1; the local Gram matrices are ridge-regularized by
    reg times their trace. The constant eigenvector is discarded.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParamError(f"expected 2-D data, got shape {X.shape}")
    n, d = X.shape
    if n_neighbors >= n:
        raise NeighborError(f"n_neighbors={n_neighbors} must be < n={n}")
    if n_neighbors < 1:
        raise ParamError(f"n_neighbors={n_neighbors} must be >= 1")
    if not (1 <= k <= n - 2):
        raise ParamError(f"k={k} not in [1, n-2={n - 2}]")
    if k > n_neighbors:
        warnings.warn(f"k={k} exceeds n_neighbors={n_neighbors}; "
                      f"embedding quality may suffer", stacklevel=2)

    nbrs = knn_indices(pairwise_sq_dists(X), n_neighbors)
    W = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        W[i, nbrs[i]] = reconstruction_weights(X[i], X[nbrs[i]], reg)

    M = np.eye(n) - W
    M = M.T @ M
    try:
        evals, evecs = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals, kind="stable")
    emb = fix_signs_cols(evecs[:, order[1:k + 1]])

    proj = Projection(method="LLE", in_dim=d, out_dim=k,
                      fitted_points=X, fitted_embedding=emb,
                      neighbors_k=n_neighbors)
    proj.extras["weights_row_sums"] = W.sum(axis=1)
    return proj
