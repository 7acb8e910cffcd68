"""Principal component analysis fitted through the SVD of the centered data
matrix (the test oracle goes through the covariance eigendecomposition, so
the two routes are numerically independent)."""

from __future__ import annotations

import numpy as np

from ..errors import NumericalError, ParamError
from .projection import Projection, fix_signs_rows


def fit_pca(X: np.ndarray, k: int, standardize: bool = False) -> Projection:
    """Top-k principal axes of X (n x d), axes sorted by descending variance.

    Component signs are canonicalized (largest-magnitude entry positive).
    With standardize=True, columns are scaled to unit variance before the
    decomposition so each feature weighs equally in choosing the axes;
    zero-variance columns are left unscaled. Application is always
    (X - mean) @ components.T.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParamError(f"expected 2-D data, got shape {X.shape}")
    n, d = X.shape
    if n < 2:
        raise ParamError(f"need at least 2 rows, got {n}")
    if not (1 <= k <= min(n - 1, d)):
        raise ParamError(f"k={k} not in [1, min(n-1={n - 1}, d={d})]")

    mean = X.mean(axis=0)
    Xc = X - mean
    if standardize:
        std = Xc.std(axis=0, ddof=1)
        scale = np.where(std > 0, std, 1.0)
        Xw = Xc / scale
    else:
        Xw = Xc
    try:
        _, svals, Vt = np.linalg.svd(Xw, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc

    components = fix_signs_rows(Vt[:k])
    proj = Projection(method="PCA", in_dim=d, out_dim=k,
                      mean=mean, components=components)
    proj.extras["eigenvalues"] = (svals[:k] ** 2) / (n - 1)
    return proj
