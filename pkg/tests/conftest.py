import numpy as np
import pytest


def central_fd(f, x, h=1e-5):
    """Central finite-difference gradient of scalar f at point x (any shape)."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    gf = g.ravel()
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp.ravel()[i] += h
        xm.ravel()[i] -= h
        gf[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def spearman(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ra = np.argsort(np.argsort(a, kind="stable"), kind="stable").astype(float)
    rb = np.argsort(np.argsort(b, kind="stable"), kind="stable").astype(float)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra ** 2).sum() * (rb ** 2).sum())
    return float((ra * rb).sum() / denom) if denom else 0.0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
