"""Distillation loss: mean squared error between temperature-scaled teacher
and student vectors. Dividing both sides by t equals pre-scaling the inputs,
so the loss scales by 1/t^2."""

from __future__ import annotations

import numpy as np

from ..errors import ParamError, ShapeError


def kd_loss(z_t: np.ndarray, z_s: np.ndarray, t: float = 1.0,
            mask: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Loss and its gradient with respect to the student vectors z_s.

    mask, when given, marks real (non-padding) rows; masked-out rows
    contribute nothing to the mean or the gradient.
    """
    z_t = np.asarray(z_t, dtype=np.float64)
    z_s = np.asarray(z_s, dtype=np.float64)
    if z_t.shape != z_s.shape:
        raise ShapeError(f"teacher {z_t.shape} vs student {z_s.shape}")
    if t <= 0:
        raise ParamError(f"temperature must be positive, got {t}")

    if mask is None:
        rows = np.ones(z_t.shape[0], dtype=bool)
    else:
        rows = np.asarray(mask, dtype=bool)
        if rows.shape != (z_t.shape[0],):
            raise ShapeError(f"mask shape {rows.shape} vs {z_t.shape[0]} rows")
    count = int(rows.sum()) * (z_t.shape[1] if z_t.ndim > 1 else 1)
    if count == 0:
        raise ShapeError("mask excludes every row")

    diff = (z_t - z_s) / t
    diff[~rows] = 0.0
    loss = float(np.sum(diff * diff) / count)
    grad = 2.0 * (z_s - z_t) / (t * t * count)
    grad[~rows] = 0.0
    return loss, grad
