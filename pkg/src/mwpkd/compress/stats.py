"""Distribution diagnostics and the self-similarity gap between an original
vector set and its reduced counterpart."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError, ZeroVectorError

HIST_BINS = 64
HIST_RANGE = 8.0  # standardized values clipped into [-8, 8]
CONST_VAR_EPS = 1e-18


@dataclass
class DimStats:
    per_dim_mean: np.ndarray
    per_dim_var: np.ndarray
    pooled_skewness: float
    pooled_excess_kurtosis: float
    histogram: np.ndarray
    approx_normal: bool
    constant_dims: np.ndarray  # boolean flags, excluded from pooling


def dim_stats(X: np.ndarray) -> DimStats:
    """Per-dimension moments plus pooled shape statistics of standardized
    values. Constant dimensions are flagged rather than raising."""
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    mean = X.mean(axis=0)
    var = X.var(axis=0, ddof=1) if n >= 2 else np.zeros(d)
    constant = var <= CONST_VAR_EPS

    live = np.flatnonzero(~constant)
    if live.size:
        z = (X[:, live] - mean[live]) / np.sqrt(var[live])
        pooled = z.ravel()
        m2 = float(np.mean(pooled ** 2))
        m3 = float(np.mean(pooled ** 3))
        m4 = float(np.mean(pooled ** 4))
        skew = m3 / m2 ** 1.5
        exkurt = m4 / m2 ** 2 - 3.0
        clipped = np.clip(pooled, -HIST_RANGE, HIST_RANGE)
        hist, _ = np.histogram(clipped, bins=HIST_BINS,
                               range=(-HIST_RANGE, HIST_RANGE))
        approx = abs(skew) < 0.5 and abs(exkurt) < 1.0
    else:
        skew = 0.0
        exkurt = 0.0
        hist = np.zeros(HIST_BINS, dtype=np.int64)
        approx = False

    return DimStats(per_dim_mean=mean, per_dim_var=var,
                    pooled_skewness=skew, pooled_excess_kurtosis=exkurt,
                    histogram=hist, approx_normal=approx,
                    constant_dims=constant)


def _cosine_matrix(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroVectorError(f"row {zero[0]} is all zeros")
    U = X / norms[:, None]
    C = U @ U.T
    return np.clip(C, -1.0, 1.0)


def self_similarity_gap(X: np.ndarray, Y: np.ndarray) -> float:
    """Mean absolute difference between the pairwise cosine-similarity
    matrices of X and Y (same rows, any widths). Lies in [0, 2]."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise ShapeError("both arguments must be 2-D")
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"row counts differ: {X.shape[0]} vs {Y.shape[0]}")
    return float(np.mean(np.abs(_cosine_matrix(X) - _cosine_matrix(Y))))
