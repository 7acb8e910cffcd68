"""Classical MDS against the double-centering oracle: exact reconstruction
of Euclidean distance matrices."""

import numpy as np
import pytest

from mwpkd.compress import fit_classical_mds, mds_stress, pairwise_distances
from mwpkd.errors import ParamError


def test_three_points_on_a_line():
    pts = np.array([[0.0], [1.0], [3.0]])
    D = np.abs(pts - pts.T)
    proj = fit_classical_mds(D, 1, precomputed=True)
    emb = proj.fitted_embedding
    D_rec = np.abs(emb - emb.T)
    assert np.allclose(D_rec, D, atol=1e-9)


def test_identical_points_zero_embedding():
    D = np.zeros((4, 4))
    proj = fit_classical_mds(D, 2, precomputed=True)
    assert np.allclose(proj.fitted_embedding, 0.0, atol=1e-12)


def test_generic_euclidean_exact_at_n_minus_1(rng):
    for n in (5, 12, 30):
        X = rng.standard_normal((n, n + 3))
        D = pairwise_distances(X)
        proj = fit_classical_mds(D, n - 1, precomputed=True)
        assert mds_stress(D, proj.fitted_embedding) <= 1e-9


def test_from_points_matches_from_distances(rng):
    X = rng.standard_normal((20, 6))
    D = pairwise_distances(X)
    a = fit_classical_mds(X, 3).fitted_embedding
    b = fit_classical_mds(D, 3, precomputed=True).fitted_embedding
    assert np.allclose(a, b, atol=1e-9)


def test_asymmetric_matrix_rejected():
    D = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ParamError, match="symmetric"):
        fit_classical_mds(D, 1, precomputed=True)


def test_nonzero_diagonal_rejected():
    D = np.eye(3)
    with pytest.raises(ParamError, match="diagonal"):
        fit_classical_mds(D, 1, precomputed=True)


def test_k_out_of_range(rng):
    X = rng.standard_normal((6, 4))
    with pytest.raises(ParamError):
        fit_classical_mds(X, 0)
    with pytest.raises(ParamError):
        fit_classical_mds(X, 6)


def test_negative_eigenvalue_clamping_warns():
    # a non-Euclidean metric: unit-distance graph metric on a star needs
    # clamping when over-embedded
    D = np.array([[0.0, 1.0, 1.0, 1.0],
                  [1.0, 0.0, 2.0, 2.0],
                  [1.0, 2.0, 0.0, 2.0],
                  [1.0, 2.0, 2.0, 0.0]])
    with pytest.warns(UserWarning, match="clamped"):
        proj = fit_classical_mds(D, 3, precomputed=True)
    assert proj.extras["clamped_negative_eigenvalues"] >= 1


def test_smacof_reduces_stress(rng):
    X = rng.standard_normal((15, 8))
    D = pairwise_distances(X)
    base = fit_classical_mds(D, 2, precomputed=True)
    refined = fit_classical_mds(D, 2, precomputed=True, smacof_iters=50)
    assert refined.extras["stress"] <= base.extras["stress"] + 1e-12
