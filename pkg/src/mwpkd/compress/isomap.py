"""ISOMAP: geodesic distances over a symmetric k-NN graph, then classical
multidimensional scaling on the geodesic matrix."""

from __future__ import annotations

import numpy as np

from ..errors import GraphError, ParamError
from ..kernels import floyd_warshall, pairwise_sq_dists
from .mds import classical_mds_coords
from .projection import Projection, knn_indices


def _neighbor_graph(X: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Dense symmetric edge-weight matrix; np.inf where no edge."""
    n = X.shape[0]
    D2 = pairwise_sq_dists(X)
    nbrs = knn_indices(D2, n_neighbors)
    W = np.full((n, n), np.inf)
    np.fill_diagonal(W, 0.0)
    for i in range(n):
        for j in nbrs[i]:
            w = np.sqrt(D2[i, j])
            W[i, j] = w
            W[j, i] = w
    return W


def _component_count(W: np.ndarray) -> int:
    n = W.shape[0]
    seen = np.zeros(n, dtype=bool)
    comps = 0
    for s in range(n):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(np.isfinite(W[u])):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
    return comps


def fit_isomap(X: np.ndarray, k: int, n_neighbors: int) -> Projection:
    """Embed X (n x d) into k dimensions preserving geodesic distances."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParamError(f"expected 2-D data, got shape {X.shape}")
    n, d = X.shape
    if not (1 <= n_neighbors < n):
        raise ParamError(f"n_neighbors={n_neighbors} not in [1, n-1={n - 1}]")
    if not (1 <= k <= min(n - 1, d)):
        raise ParamError(f"k={k} not in [1, min(n-1, d)={min(n - 1, d)}]")

    W = _neighbor_graph(X, n_neighbors)
    comps = _component_count(W)
    if comps > 1:
        raise GraphError(
            f"neighbor graph is disconnected ({comps} components); "
            f"increase n_neighbors")
    G = floyd_warshall(W)
    coords, clamped = classical_mds_coords(G, k)

    proj = Projection(method="ISOMAP", in_dim=d, out_dim=k,
                      fitted_points=X, fitted_embedding=coords,
                      neighbors_k=n_neighbors)
    proj.extras["clamped_negative_eigenvalues"] = clamped
    return proj
