"""Dimensionality reduction: six fitted compressors, the pruning baseline,
and the distribution / self-similarity diagnostics."""

from __future__ import annotations

import numpy as np

from ..errors import ParamError
from .projection import (METHODS, Projection, apply_projection,
                         pairwise_distances, read_projection, write_projection)
from .pca import fit_pca
from .mds import fit_classical_mds, mds_stress
from .lle import fit_lle
from .isomap import fit_isomap
from .tsne import fit_tsne2d
from .prune import prune_dims
from .stats import DimStats, dim_stats, self_similarity_gap


def fit_compressor(method: str, X: np.ndarray, out_dim: int, seed: int = 0,
                   n_neighbors: int = 10, **kw) -> Projection:
    """Uniform dispatcher used by the sweep harness and the CLI."""
    method = method.upper()
    if method == "PCA":
        return fit_pca(X, out_dim, **kw)
    if method == "MDS":
        return fit_classical_mds(X, out_dim, **kw)
    if method == "LLE":
        return fit_lle(X, out_dim, n_neighbors=n_neighbors, **kw)
    if method == "ISOMAP":
        return fit_isomap(X, out_dim, n_neighbors=n_neighbors)
    if method == "TSNE2D":
        if out_dim != 2:
            raise ParamError(f"TSNE2D embeds to 2 dimensions, not {out_dim}")
        kw.setdefault("perplexity", min(15.0, max(2.0, X.shape[0] / 4)))
        kw.setdefault("iters", 500)
        return fit_tsne2d(X, seed=seed, **kw)
    if method == "PRUNE":
        return prune_dims(X, out_dim, **kw)
    if method == "LINEAR":
        # seeded random linear map; trained jointly by consumers that ask for it
        rng = np.random.default_rng(seed)
        d = X.shape[1]
        limit = np.sqrt(6.0 / (d + out_dim))
        comp = rng.uniform(-limit, limit, size=(out_dim, d))
        return Projection(method="LINEAR", in_dim=d, out_dim=out_dim,
                          mean=np.zeros(d), components=comp)
    raise ParamError(f"unknown compressor method {method!r}")


__all__ = [
    "METHODS", "Projection", "apply_projection", "pairwise_distances",
    "read_projection", "write_projection",
    "fit_pca", "fit_classical_mds", "mds_stress", "fit_lle", "fit_isomap",
    "fit_tsne2d", "prune_dims", "fit_compressor",
    "DimStats", "dim_stats", "self_similarity_gap",
]
