"""Classical multidimensional scaling (double-centering + eigendecomposition)
with optional SMACOF stress-majorization refinement."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import NumericalError, ParamError
from ..kernels import pairwise_sq_dists
from .projection import Projection, fix_signs_cols

DEFAULT_OOS_NEIGHBORS = 10


def _validate_distance_matrix(D: np.ndarray) -> None:
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ParamError(f"distance matrix must be square, got {D.shape}")
    if not np.allclose(D, D.T, atol=1e-9):
        raise ParamError("distance matrix is not symmetric")
    if np.any(np.diag(D) != 0):
        raise ParamError("distance matrix has a non-zero diagonal")
    if np.any(D < 0):
        raise ParamError("distance matrix has negative entries")


def classical_mds_coords(D: np.ndarray, k: int) -> tuple[np.ndarray, int]:
    """Embed a distance matrix; returns (coords, clamped_negative_count)."""
    n = D.shape[0]
    D2 = D ** 2
    row = D2.mean(axis=1, keepdims=True)
    col = D2.mean(axis=0, keepdims=True)
    B = -0.5 * (D2 - row - col + D2.mean())
    try:
        evals, evecs = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals, kind="stable")[::-1][:k]
    lam = evals[order]
    V = evecs[:, order]
    clamped = int(np.sum(lam < 0))
    if clamped:
        warnings.warn(f"classical MDS clamped {clamped} negative eigenvalues",
                      stacklevel=2)
    lam = np.maximum(lam, 0.0)
    coords = fix_signs_cols(V * np.sqrt(lam))
    return coords, clamped


def mds_stress(D: np.ndarray, Y: np.ndarray) -> float:
    """Kruskal stress-1 between a target distance matrix and an embedding."""
    E = np.sqrt(pairwise_sq_dists(Y))
    iu = np.triu_indices(D.shape[0], k=1)
    denom = float(np.sum(D[iu] ** 2))
    if denom == 0.0:
        return 0.0
    return float(np.sqrt(np.sum((E[iu] - D[iu]) ** 2) / denom))


def _smacof(D: np.ndarray, Y: np.ndarray, max_iter: int, tol: float) -> np.ndarray:
    n = D.shape[0]
    prev = mds_stress(D, Y)
    for _ in range(max_iter):
        E = np.sqrt(pairwise_sq_dists(Y))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(E > 0, D / E, 0.0)
        B = -ratio
        np.fill_diagonal(B, 0.0)
        np.fill_diagonal(B, -B.sum(axis=1))
        Y = (B @ Y) / n
        cur = mds_stress(D, Y)
        if abs(prev - cur) < tol:
            break
        prev = cur
    return Y


def fit_classical_mds(data: np.ndarray, k: int, precomputed: bool = False,
                      smacof_iters: int = 0, smacof_tol: float = 1e-6,
                      oos_neighbors: int = DEFAULT_OOS_NEIGHBORS) -> Projection:
    """Fit classical MDS from points (default) or a distance matrix.

    When fitted from points, out-of-sample application is available through
    locally-linear reconstruction over oos_neighbors fitted points.
    """
    data = np.asarray(data, dtype=np.float64)
    if precomputed:
        _validate_distance_matrix(data)
        D = data
        X = None
        in_dim = D.shape[0]
    else:
        if data.ndim != 2:
            raise ParamError(f"expected 2-D data, got shape {data.shape}")
        X = data
        D = np.sqrt(pairwise_sq_dists(X))
        in_dim = X.shape[1]
    n = D.shape[0]
    if not (1 <= k <= n - 1):
        raise ParamError(f"k={k} not in [1, n-1={n - 1}]")
    if X is not None and k > in_dim:
        raise ParamError(f"k={k} exceeds the point dimension {in_dim}")

    coords, clamped = classical_mds_coords(D, k)
    if smacof_iters > 0:
        coords = _smacof(D, coords, smacof_iters, smacof_tol)

    proj = Projection(method="MDS", in_dim=in_dim, out_dim=k,
                      fitted_points=X, fitted_embedding=coords,
                      neighbors_k=min(oos_neighbors, n - 1) if X is not None else 0)
    proj.extras["clamped_negative_eigenvalues"] = clamped
    proj.extras["stress"] = mds_stress(D, coords)
    return proj
