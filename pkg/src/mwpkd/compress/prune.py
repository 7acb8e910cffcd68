"""Dimension pruning: keep the top-k input dimensions by a simple statistic.

The baseline the compressors are measured against; applying the projection is
exact column selection.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParamError
from .projection import Projection

CRITERIA = ("VARIANCE", "ABSMEAN")


def prune_dims(X: np.ndarray, k: int, criterion: str = "VARIANCE") -> Projection:
    """Select the k dimensions with the largest criterion value.

    Ranking is descending by the chosen criterion, ties broken by the other
    criterion (descending), then by lower index. selected_indices holds the
    winners in rank order and components is the matching 0/1 selection matrix.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ParamError(f"expected 2-D data, got shape {X.shape}")
    d = X.shape[1]
    if not (1 <= k <= d):
        raise ParamError(f"k={k} not in [1, d={d}]")
    if criterion not in CRITERIA:
        raise ParamError(f"criterion must be one of {CRITERIA}, got {criterion!r}")

    var = X.var(axis=0)
    absmean = np.abs(X.mean(axis=0))
    primary, secondary = ((var, absmean) if criterion == "VARIANCE"
                          else (absmean, var))
    # lexsort: last key is most significant
    order = np.lexsort((np.arange(d), -secondary, -primary))
    selected = order[:k].astype(np.intp)

    components = np.zeros((k, d), dtype=np.float64)
    components[np.arange(k), selected] = 1.0
    return Projection(method="PRUNE", in_dim=d, out_dim=k,
                      mean=np.zeros(d), components=components,
                      selected_indices=selected)
