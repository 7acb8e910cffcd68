"""Numba kernels against their pure-numpy fallbacks."""

import numpy as np
import pytest

from mwpkd import backend, kernels


def test_active_backend_reports():
    assert backend.active_backend() in ("numba", "numpy")


needs_numba = pytest.mark.skipif(backend.active_backend() != "numba",
                                 reason="numba backend not active")


@needs_numba
def test_pairwise_parity(rng):
    X = rng.standard_normal((40, 7))
    a = kernels.pairwise_sq_dists(X)
    b = kernels.pairwise_sq_dists_np(X)
    assert np.allclose(a, b, atol=1e-10)
    assert np.all(np.diag(a) == 0)


@needs_numba
def test_floyd_warshall_parity(rng):
    n = 25
    W = np.full((n, n), np.inf)
    np.fill_diagonal(W, 0.0)
    for _ in range(80):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            w = float(rng.uniform(0.1, 5.0))
            W[i, j] = min(W[i, j], w)
            W[j, i] = W[i, j]
    a = kernels.floyd_warshall(W)
    b = kernels.floyd_warshall_np(W)
    assert np.allclose(a, b, equal_nan=True)


@needs_numba
def test_tsne_probs_parity(rng):
    X = rng.standard_normal((30, 5))
    D2 = kernels.pairwise_sq_dists_np(X)
    a, beta_a = kernels.tsne_cond_probs(D2, np.log(8.0), 1e-4)
    b, beta_b = kernels.tsne_cond_probs_np(D2, np.log(8.0), 1e-4, 64)
    assert np.allclose(a, b, atol=1e-10)
    assert np.allclose(beta_a, beta_b, rtol=1e-10)


@needs_numba
def test_tsne_grad_parity(rng):
    n = 20
    P = np.abs(rng.standard_normal((n, n)))
    P = (P + P.T)
    np.fill_diagonal(P, 0.0)
    P /= P.sum()
    Y = rng.standard_normal((n, 2))
    a = kernels.tsne_kl_grad(P, Y)
    b = kernels.tsne_kl_grad_np(P, Y)
    assert np.allclose(a, b, atol=1e-10)


def test_numpy_fallback_behaves(rng):
    # the fallbacks themselves hold the kernel contracts
    X = rng.standard_normal((15, 4))
    D2 = kernels.pairwise_sq_dists_np(X)
    brute = np.array([[np.sum((X[i] - X[j]) ** 2) for j in range(15)]
                      for i in range(15)])
    assert np.allclose(D2, brute, atol=1e-10)

    W = np.array([[0.0, 1.0, np.inf],
                  [1.0, 0.0, 1.0],
                  [np.inf, 1.0, 0.0]])
    G = kernels.floyd_warshall_np(W)
    assert G[0, 2] == 2.0
