"""Dense brute-force reference computations backing the test suite.

Everything here is O(n^3) dense linear algebra meant for small instances:
symmetric eigendecomposition, Moore-Penrose pseudo-inverse of semidefinite
matrices, the eliminated coarse block of a hierarchical two-by-two splitting,
and suprema of generalized Rayleigh quotients on a deflated subspace.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "eig_sym",
    "pinv_sym",
    "schur_dense",
    "rayleigh_sup",
    "rayleigh_extremes",
    "orthonormal_complement",
    "dense_laplacian",
]

_DENSE_CAP = 2048


def eig_sym(M):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    The input is symmetrized before factorization, so slightly asymmetric
    inputs are accepted.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    M = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(M)
    return w, V


def pinv_sym(M, rtol=1e-10):
    """Moore-Penrose pseudo-inverse of a symmetric PSD matrix.

    Eigenvalues below ``rtol * max(eigenvalue)`` are treated as zero.
    """
    w, V = eig_sym(M)
    cut = rtol * max(w.max(), 0.0)
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    return (V * inv) @ V.T


def dense_laplacian(g):
    """Dense Laplacian of a Graph; test-scale only."""
    if g.n > _DENSE_CAP:
        raise ValueError(f"dense work capped at n <= {_DENSE_CAP}")
    A = np.zeros((g.n, g.n))
    for i, j in g.edges:
        A[i, i] += 1.0
        A[j, j] += 1.0
        A[i, j] -= 1.0
        A[j, i] -= 1.0
    return A


def schur_dense(A, Y, P):
    """Coarse block left after eliminating the Y block:
    ``P^T A P - P^T A Y (Y^T A Y)^{-1} Y^T A P``.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.shape[0] > 64:
        raise ValueError("schur_dense is limited to n <= 64")
    Y = np.asarray(Y, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    AY = A @ Y
    AP = A @ P
    K = Y.T @ AY
    X = np.linalg.solve(K, Y.T @ AP)
    return P.T @ AP - (Y.T @ AP).T @ X


def orthonormal_complement(v):
    """Orthonormal basis (n x (n-1)) of the complement of a nonzero vector.

    Built from the Householder reflection mapping e_1 to v/||v||; columns
    2..n of the reflector span the complement exactly.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[0]
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("cannot deflate the zero vector")
    u = v / nv
    w = u.copy()
    w[0] += 1.0 if u[0] >= 0 else -1.0
    w /= np.linalg.norm(w)
    H = np.eye(n) - 2.0 * np.outer(w, w)
    return H[:, 1:]


def rayleigh_extremes(Mnum, Mden, deflate):
    """Extremes of (Mnum v, v)/(Mden v, v) over v orthogonal to ``deflate``.

    Both matrices must be symmetric PSD with ``deflate`` in their shared
    kernel, and Mden must be positive definite on the complement.
    """
    W = orthonormal_complement(deflate)
    Nw = W.T @ np.asarray(Mnum, dtype=np.float64) @ W
    Dw = W.T @ np.asarray(Mden, dtype=np.float64) @ W
    Nw = 0.5 * (Nw + Nw.T)
    Dw = 0.5 * (Dw + Dw.T)
    vals = scipy.linalg.eigh(Nw, Dw, eigvals_only=True)
    return float(vals[0]), float(vals[-1])


def rayleigh_sup(Mnum, Mden, deflate):
    """Supremum of the generalized Rayleigh quotient on the deflated subspace."""
    return rayleigh_extremes(Mnum, Mden, deflate)[1]
