#!/usr/bin/env python3
"""Time the hot kernels on both backends.

Run:  python benchmarks/bench_kernels.py [--n 400] [--reps 5]

The numba versions compile on first call; the first timing row per kernel is
taken after a warm-up call so compile time is excluded (it is reported
separately).
"""

import argparse
import time

import numpy as np

from mwpkd import backend
from mwpkd import kernels as K


def _time(fn, *args, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.n
    X = rng.standard_normal((n, 48))
    D2 = K.pairwise_sq_dists_np(X)
    W = np.where(D2 < np.quantile(D2, 0.05), np.sqrt(D2), np.inf)
    np.fill_diagonal(W, 0.0)
    P = np.abs(rng.standard_normal((n, n)))
    P = P + P.T
    np.fill_diagonal(P, 0.0)
    P /= P.sum()
    Y = rng.standard_normal((n, 2))

    cases = [
        ("pairwise_sq_dists", K.pairwise_sq_dists, K.pairwise_sq_dists_np, (X,)),
        ("floyd_warshall", K.floyd_warshall, K.floyd_warshall_np, (W,)),
        ("tsne_cond_probs", lambda d2: K.tsne_cond_probs(d2, np.log(20.0)),
         lambda d2: K.tsne_cond_probs_np(d2, np.log(20.0), 1e-4, 64), (D2,)),
        ("tsne_kl_grad", K.tsne_kl_grad, K.tsne_kl_grad_np, (P, Y)),
    ]

    print(f"backend selected: {backend.active_backend()}  (n={n})")
    print(f"{'kernel':<20} {'selected':>12} {'numpy':>12} {'speedup':>9}")
    for name, selected, fallback, a in cases:
        if backend.active_backend() == "numba":
            t_compile = time.perf_counter()
            selected(*a)  # warm-up / compile
            t_compile = time.perf_counter() - t_compile
        else:
            t_compile = 0.0
        t_sel = _time(selected, *a, reps=args.reps)
        t_np = _time(fallback, *a, reps=args.reps)
        ratio = t_np / t_sel if t_sel > 0 else float("inf")
        note = f" (first call {t_compile * 1e3:.0f} ms)" if t_compile > 0.05 else ""
        print(f"{name:<20} {t_sel * 1e3:>10.2f}ms {t_np * 1e3:>10.2f}ms "
              f"{ratio:>8.1f}x{note}")


if __name__ == "__main__":
    main()
