"""Fitted projections: the common type, out-of-sample application, and the
PRJ1 binary format.

Linear methods (LINEAR, PCA, PRUNE) store an explicit components matrix and
apply as (X - mean) @ components.T (PRUNE skips centering). Fitted manifold
methods (MDS, LLE, ISOMAP) retain their training inputs and outputs and embed
new points by locally-linear reconstruction over the neighbors_k nearest
fitted points. TSNE2D is fit-only and refuses out-of-sample application.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .._io import write_atomic
from ..errors import (FormatError, NumericalError, ShapeError,
                      UnsupportedError, ValidationError)
from ..kernels import pairwise_sq_dists

METHODS = ("LINEAR", "PCA", "MDS", "LLE", "ISOMAP", "TSNE2D", "PRUNE")
_METHOD_CODE = {m: i for i, m in enumerate(METHODS)}

_LINEAR_LIKE = ("LINEAR", "PCA", "PRUNE")
_FITTED = ("MDS", "LLE", "ISOMAP")

COINCIDENCE_EPS = 1e-12


@dataclass
class Projection:
    method: str
    in_dim: int
    out_dim: int
    mean: np.ndarray | None = None
    components: np.ndarray | None = None
    fitted_points: np.ndarray | None = None
    fitted_embedding: np.ndarray | None = None
    neighbors_k: int = 0
    selected_indices: np.ndarray | None = None
    extras: dict = field(default_factory=dict, repr=False, compare=False)

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"unknown method {self.method!r}")
        if not (1 <= self.out_dim <= self.in_dim):
            raise ValidationError(
                f"out_dim {self.out_dim} not in [1, in_dim={self.in_dim}]")
        if self.method in _LINEAR_LIKE and self.components is None:
            raise ValidationError(f"{self.method} projection lacks components")
        if self.method in _FITTED and self.fitted_embedding is None:
            raise ValidationError(f"{self.method} projection lacks fitted_embedding")


def fix_signs_rows(M: np.ndarray) -> np.ndarray:
    """Flip each row so its largest-magnitude entry is positive."""
    M = M.copy()
    for r in range(M.shape[0]):
        j = int(np.argmax(np.abs(M[r])))
        if M[r, j] < 0:
            M[r] = -M[r]
    return M


def fix_signs_cols(M: np.ndarray) -> np.ndarray:
    return fix_signs_rows(M.T).T


def knn_indices(D2: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Per-row nearest-neighbor indices (self excluded), stable ordering."""
    n = D2.shape[0]
    D = D2.copy()
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")
    return order[:, :n_neighbors]


def reconstruction_weights(x: np.ndarray, Z: np.ndarray, reg: float) -> np.ndarray:
    """Constrained least-squares weights reconstructing x from neighbor rows Z.

    Rows sum to 1; the local Gram matrix is ridge-regularized by reg times its
    trace (or reg alone when the trace vanishes).
    """
    diff = Z - x
    G = diff @ diff.T
    tr = np.trace(G)
    lam = reg * tr if tr > 0 else reg
    G = G + lam * np.eye(G.shape[0])
    try:
        w = np.linalg.solve(G, np.ones(G.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular neighbor Gram matrix: {exc}") from exc
    s = w.sum()
    if s == 0.0:
        raise NumericalError("degenerate reconstruction weights")
    return w / s


def apply_projection(p: Projection, X: np.ndarray) -> np.ndarray:
    """Map an (m, in_dim) matrix through a fitted projection."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != p.in_dim:
        raise ShapeError(
            f"input has shape {X.shape}, projection expects (*, {p.in_dim})")
    if p.method == "PRUNE":
        return X[:, np.asarray(p.selected_indices, dtype=np.intp)].copy()
    if p.method in ("LINEAR", "PCA"):
        mean = p.mean if p.mean is not None else np.zeros(p.in_dim)
        return (X - mean) @ p.components.T
    if p.method == "TSNE2D":
        raise UnsupportedError("TSNE2D is fit-only and has no out-of-sample rule")
    if p.method in _FITTED:
        if p.fitted_points is None:
            raise UnsupportedError(
                f"{p.method} was fitted from a distance matrix only; "
                f"no training points retained for out-of-sample use")
        return _out_of_sample(p, X)
    raise UnsupportedError(f"cannot apply method {p.method!r}")


def _out_of_sample(p: Projection, X: np.ndarray) -> np.ndarray:
    pts = p.fitted_points
    emb = p.fitted_embedding
    k = max(1, min(p.neighbors_k or 1, pts.shape[0]))
    out = np.empty((X.shape[0], p.out_dim), dtype=np.float64)
    d2 = _cross_sq_dists(X, pts)
    for i in range(X.shape[0]):
        order = np.argsort(d2[i], kind="stable")
        if d2[i, order[0]] < COINCIDENCE_EPS:
            out[i] = emb[order[0]]
            continue
        nbrs = order[:k]
        w = reconstruction_weights(X[i], pts[nbrs], reg=1e-3)
        out[i] = w @ emb[nbrs]
    return out


def _cross_sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    sa = np.einsum("ij,ij->i", A, A)
    sb = np.einsum("ij,ij->i", B, B)
    D2 = sa[:, None] + sb[None, :] - 2.0 * (A @ B.T)
    np.maximum(D2, 0.0, out=D2)
    return D2


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    return np.sqrt(pairwise_sq_dists(np.asarray(X, dtype=np.float64)))


# ---------------------------------------------------------------- PRJ1 format

_MAGIC = b"PRJ1"
_VERSION = 1


def _pack_mat(M: np.ndarray | None) -> bytes:
    if M is None:
        return struct.pack("<II", 0, 0)
    M = np.ascontiguousarray(M, dtype=np.float32)
    return struct.pack("<II", M.shape[0], M.shape[1]) + M.tobytes()


def _pack_vec(v: np.ndarray | None) -> bytes:
    if v is None:
        return struct.pack("<I", 0)
    v = np.ascontiguousarray(v, dtype=np.float32)
    return struct.pack("<I", v.shape[0]) + v.tobytes()


def write_projection(p: Projection, path) -> None:
    p.validate()
    chunks = [struct.pack("<4sIBII", _MAGIC, _VERSION,
                          _METHOD_CODE[p.method], p.in_dim, p.out_dim)]
    chunks.append(_pack_vec(p.mean))
    chunks.append(_pack_mat(p.components))
    chunks.append(_pack_mat(p.fitted_points))
    chunks.append(_pack_mat(p.fitted_embedding))
    chunks.append(struct.pack("<I", p.neighbors_k or 0))
    sel = p.selected_indices
    if sel is None:
        chunks.append(struct.pack("<I", 0))
    else:
        sel = np.asarray(sel, dtype=np.uint32)
        chunks.append(struct.pack("<I", sel.shape[0]) + sel.tobytes())
    write_atomic(path, b"".join(chunks))


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.off = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.off + size > len(self.blob):
            raise FormatError(f"truncated file at byte offset {self.off}")
        vals = struct.unpack_from(fmt, self.blob, self.off)
        self.off += size
        return vals

    def take_f32(self, count: int) -> np.ndarray:
        nbytes = count * 4
        if self.off + nbytes > len(self.blob):
            raise FormatError(f"truncated file at byte offset {self.off}")
        arr = np.frombuffer(self.blob, dtype="<f4", count=count,
                            offset=self.off).astype(np.float64)
        self.off += nbytes
        return arr


def read_projection(path) -> Projection:
    blob = open(path, "rb").read()
    r = _Reader(blob)
    magic, version, code, in_dim, out_dim = r.take("<4sIBII")
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0")
    if version != _VERSION:
        raise FormatError(f"unsupported version {version} at byte offset 4")
    if code >= len(METHODS):
        raise FormatError(f"unknown method code {code} at byte offset 8")

    (mlen,) = r.take("<I")
    mean = r.take_f32(mlen) if mlen else None

    def read_mat():
        rows, cols = r.take("<II")
        if rows == 0:
            return None
        return r.take_f32(rows * cols).reshape(rows, cols)

    components = read_mat()
    fitted_points = read_mat()
    fitted_embedding = read_mat()
    (neighbors_k,) = r.take("<I")
    (selcount,) = r.take("<I")
    sel = None
    if selcount:
        nbytes = selcount * 4
        if r.off + nbytes > len(blob):
            raise FormatError(f"truncated file at byte offset {r.off}")
        sel = np.frombuffer(blob, dtype="<u4", count=selcount,
                            offset=r.off).astype(np.intp)
        r.off += nbytes
    if r.off != len(blob):
        raise FormatError(f"{len(blob) - r.off} trailing bytes at byte offset {r.off}")

    p = Projection(method=METHODS[code], in_dim=in_dim, out_dim=out_dim,
                   mean=mean, components=components,
                   fitted_points=fitted_points,
                   fitted_embedding=fitted_embedding,
                   neighbors_k=neighbors_k, selected_indices=sel)
    p.validate()
    return p
