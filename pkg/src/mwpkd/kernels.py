"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

Each public name dispatches to the implementation chosen by mwpkd.backend.
The numba versions are serial @njit loops (deterministic regardless of the
threading layer); the numpy versions are vectorized equivalents. Both sides
are exercised against each other in the test suite and timed side by side in
benchmarks/bench_kernels.py.
"""

import numpy as np

from .backend import ACTIVE

# ---------------------------------------------------------------- numpy side

def pairwise_sq_dists_np(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between all row pairs of X (n x d)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    sq = np.einsum("ij,ij->i", X, X)
    D2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(D2, 0.0, out=D2)
    np.fill_diagonal(D2, 0.0)
    return D2


def floyd_warshall_np(D: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths over a dense weighted graph (inf = no edge)."""
    D = np.array(D, dtype=np.float64, copy=True)
    n = D.shape[0]
    for k in range(n):
        np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :], out=D)
    return D


def tsne_cond_probs_np(D2: np.ndarray, target_entropy: float, tol: float,
                       max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-point Gaussian conditional probabilities at a fixed entropy.

    Binary-searches each point's precision beta until the Shannon entropy of
    its conditional distribution is within tol of target_entropy (natural
    log). Returns (P_conditional, betas) with a zero diagonal.
    """
    n = D2.shape[0]
    P = np.zeros((n, n), dtype=np.float64)
    betas = np.ones(n, dtype=np.float64)
    for i in range(n):
        lo, hi = -np.inf, np.inf
        beta = 1.0
        d = np.delete(D2[i], i)
        for _ in range(max_iter):
            w = np.exp(-d * beta)
            s = w.sum()
            if s <= 0.0:
                h = 0.0
            else:
                p = w / s
                nz = p > 0.0
                h = -np.sum(p[nz] * np.log(p[nz]))
            if abs(h - target_entropy) < tol:
                break
            if h > target_entropy:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = beta / 2.0 if lo == -np.inf else (beta + lo) / 2.0
        w = np.exp(-d * beta)
        s = w.sum()
        p = w / s if s > 0.0 else np.zeros_like(w)
        P[i] = np.insert(p, i, 0.0)
        betas[i] = beta
    return P, betas


def tsne_kl_grad_np(P: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Gradient of the t-SNE KL objective wrt the 2-D embedding Y."""
    D2 = pairwise_sq_dists_np(Y)
    num = 1.0 / (1.0 + D2)
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), 1e-12)
    W = (P - Q) * num
    grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)
    return grad


# ---------------------------------------------------------------- numba side

if ACTIVE == "numba":
    from numba import njit

    @njit(cache=True)
    def _pairwise_sq_dists_nb(X):
        n, d = X.shape
        D2 = np.zeros((n, n), dtype=np.float64)
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(d):
                    diff = X[i, k] - X[j, k]
                    acc += diff * diff
                D2[i, j] = acc
                D2[j, i] = acc
        return D2

    @njit(cache=True)
    def _floyd_warshall_nb(D):
        n = D.shape[0]
        out = D.copy()
        for k in range(n):
            for i in range(n):
                dik = out[i, k]
                if dik == np.inf:
                    continue
                for j in range(n):
                    alt = dik + out[k, j]
                    if alt < out[i, j]:
                        out[i, j] = alt
        return out

    @njit(cache=True)
    def _tsne_cond_probs_nb(D2, target_entropy, tol, max_iter):
        n = D2.shape[0]
        P = np.zeros((n, n), dtype=np.float64)
        betas = np.ones(n, dtype=np.float64)
        for i in range(n):
            lo = -np.inf
            hi = np.inf
            beta = 1.0
            for _ in range(max_iter):
                s = 0.0
                for j in range(n):
                    if j != i:
                        s += np.exp(-D2[i, j] * beta)
                h = 0.0
                if s > 0.0:
                    for j in range(n):
                        if j != i:
                            p = np.exp(-D2[i, j] * beta) / s
                            if p > 0.0:
                                h -= p * np.log(p)
                if abs(h - target_entropy) < tol:
                    break
                if h > target_entropy:
                    lo = beta
                    beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
                else:
                    hi = beta
                    beta = beta / 2.0 if lo == -np.inf else (beta + lo) / 2.0
            s = 0.0
            for j in range(n):
                if j != i:
                    s += np.exp(-D2[i, j] * beta)
            if s > 0.0:
                for j in range(n):
                    if j != i:
                        P[i, j] = np.exp(-D2[i, j] * beta) / s
            betas[i] = beta
        return P, betas

    @njit(cache=True)
    def _tsne_kl_grad_nb(P, Y):
        n = Y.shape[0]
        num = np.zeros((n, n), dtype=np.float64)
        total = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    dx = Y[i, 0] - Y[j, 0]
                    dy = Y[i, 1] - Y[j, 1]
                    num[i, j] = 1.0 / (1.0 + dx * dx + dy * dy)
                    total += num[i, j]
        grad = np.zeros_like(Y)
        for i in range(n):
            for j in range(n):
                if i != j:
                    q = num[i, j] / total
                    if q < 1e-12:
                        q = 1e-12
                    w = (P[i, j] - q) * num[i, j]
                    grad[i, 0] += 4.0 * w * (Y[i, 0] - Y[j, 0])
                    grad[i, 1] += 4.0 * w * (Y[i, 1] - Y[j, 1])
        return grad

    def pairwise_sq_dists(X):
        return _pairwise_sq_dists_nb(np.ascontiguousarray(X, dtype=np.float64))

    def floyd_warshall(D):
        return _floyd_warshall_nb(np.ascontiguousarray(D, dtype=np.float64))

    def tsne_cond_probs(D2, target_entropy, tol=1e-4, max_iter=64):
        return _tsne_cond_probs_nb(
            np.ascontiguousarray(D2, dtype=np.float64),
            float(target_entropy), float(tol), int(max_iter))

    def tsne_kl_grad(P, Y):
        return _tsne_kl_grad_nb(np.ascontiguousarray(P, dtype=np.float64),
                                np.ascontiguousarray(Y, dtype=np.float64))

else:
    def pairwise_sq_dists(X):
        return pairwise_sq_dists_np(X)

    def floyd_warshall(D):
        return floyd_warshall_np(D)

    def tsne_cond_probs(D2, target_entropy, tol=1e-4, max_iter=64):
        return tsne_cond_probs_np(D2, float(target_entropy), float(tol),
                                  int(max_iter))

    def tsne_kl_grad(P, Y):
        return tsne_kl_grad_np(P, Y)
