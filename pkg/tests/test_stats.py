"""Distribution diagnostics (Monte-Carlo oracle) and self-similarity gap
properties."""

import numpy as np
import pytest

from mwpkd.compress import dim_stats, self_similarity_gap
from mwpkd.errors import ShapeError, ZeroVectorError


def test_standard_normal_monte_carlo():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((10_000, 8))
    st = dim_stats(X)
    assert np.all(np.abs(st.per_dim_mean) < 0.05)
    assert np.all(np.abs(st.per_dim_var - 1.0) < 0.05)
    assert st.approx_normal
    assert not st.constant_dims.any()
    assert st.histogram.sum() == 10_000 * 8


def test_constant_matrix():
    X = np.full((50, 4), 3.3)
    st = dim_stats(X)
    assert np.allclose(st.per_dim_var, 0.0)
    assert st.constant_dims.all()
    assert not st.approx_normal
    assert st.histogram.sum() == 0


def test_mixed_constant_dims_excluded():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((500, 3))
    X[:, 1] = -2.0
    st = dim_stats(X)
    assert st.constant_dims.tolist() == [False, True, False]
    assert st.histogram.sum() == 500 * 2


def test_heavy_tailed_not_normal():
    rng = np.random.default_rng(9)
    X = rng.standard_t(df=2, size=(5000, 4))
    st = dim_stats(X)
    assert not st.approx_normal  # huge excess kurtosis


def test_skewed_not_normal():
    rng = np.random.default_rng(10)
    X = rng.exponential(size=(5000, 3))
    st = dim_stats(X)
    assert abs(st.pooled_skewness) > 0.5
    assert not st.approx_normal


# ------------------------------------------------------------- gap metric

def test_gap_zero_on_identity(rng):
    X = rng.standard_normal((20, 6))
    assert self_similarity_gap(X, X) == 0.0


def test_gap_scale_invariance(rng):
    X = rng.standard_normal((15, 5))
    assert self_similarity_gap(X, 2.5 * X) <= 1e-12


def test_gap_symmetric_and_permutation_invariant(rng):
    X = rng.standard_normal((18, 7))
    Y = rng.standard_normal((18, 3))
    assert self_similarity_gap(X, Y) == pytest.approx(
        self_similarity_gap(Y, X), abs=1e-15)
    perm = rng.permutation(18)
    assert self_similarity_gap(X[perm], Y[perm]) == pytest.approx(
        self_similarity_gap(X, Y), abs=1e-12)


def test_gap_in_range(rng):
    for _ in range(5):
        X = rng.standard_normal((12, 6))
        Y = rng.standard_normal((12, 2))
        g = self_similarity_gap(X, Y)
        assert 0.0 <= g <= 2.0


def test_gap_errors(rng):
    X = rng.standard_normal((5, 3))
    with pytest.raises(ShapeError):
        self_similarity_gap(X, rng.standard_normal((6, 3)))
    Z = X.copy()
    Z[2] = 0.0
    with pytest.raises(ZeroVectorError):
        self_similarity_gap(X, Z)
