"""Shared test utilities: seeded graph families and dense spectral probes."""

import numpy as np

from matchamli import Graph
from matchamli.oracle import dense_laplacian, orthonormal_complement


def random_connected_graph(seed, n, extra_density=2.5):
    """Random spanning path (shuffled) plus Bernoulli extra edges; connected."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = {(min(int(perm[k]), int(perm[k + 1])), max(int(perm[k]), int(perm[k + 1])))
             for k in range(n - 1)}
    p = extra_density / n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.add((i, j))
    return Graph.from_edges(n, sorted(edges))


def dense_incidence(g):
    B = np.zeros((g.num_edges, g.n))
    for k, (i, j) in enumerate(g.edges):
        B[k, i] = 1.0
        B[k, j] = -1.0
    return B


def dense_operator(apply_fn, n):
    """Assemble the matrix of a linear operator column by column."""
    return np.column_stack([apply_fn(e) for e in np.eye(n)])


def preconditioned_spectrum(g, apply_B):
    """Eigenvalues of B^{-1} A restricted to the complement of constants."""
    A = dense_laplacian(g)
    W = orthonormal_complement(np.ones(g.n))
    Binv = dense_operator(apply_B, g.n)
    Aw = W.T @ A @ W
    wA, VA = np.linalg.eigh(0.5 * (Aw + Aw.T))
    half = (VA * np.sqrt(np.maximum(wA, 0.0))) @ VA.T
    K = W.T @ Binv @ W
    M = half @ (0.5 * (K + K.T)) @ half
    return np.linalg.eigvalsh(0.5 * (M + M.T))
