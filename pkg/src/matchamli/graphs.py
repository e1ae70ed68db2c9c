"""Immutable unweighted graphs and their Laplacian/incidence operators.

A graph is stored as a sorted edge list plus a compressed sparse adjacency
structure.  Node vectors and edge vectors are plain 1-d float arrays indexed
by vertex and by edge position respectively; every operator here is a pure
function of its inputs.

The Laplacian is never assembled at this layer: ``laplacian_apply`` works
directly from the adjacency structure, and ``A = B^T B`` links it to the
incidence (discrete gradient) operator, whose rows are oriented from the
smaller to the larger endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

from .errors import GraphFormatError

__all__ = [
    "Graph",
    "laplacian_apply",
    "incidence_apply",
    "incidence_transpose_apply",
    "connected_components",
    "load_graph",
    "save_graph",
]


@dataclass(frozen=True)
class Graph:
    """Undirected unweighted graph with 0-based vertex ids.

    Attributes
    ----------
    n : int
        Number of vertices (>= 1).
    edges : ndarray of shape (m, 2)
        Edge list with ``edges[k, 0] < edges[k, 1]``, lexicographically
        sorted, free of duplicates and self loops.  The row position is the
        edge index used by all edge vectors.
    """

    n: int
    edges: np.ndarray
    adjacency: sp.csr_matrix = field(repr=False, compare=False)
    degrees: np.ndarray = field(repr=False, compare=False)
    _edge_codes: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n, edges):
        """Build a graph from an iterable of (i, j) pairs.

        Edges are canonicalized to i < j and sorted; duplicates and
        self loops are rejected.
        """
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, 2)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self loops are not allowed")
        lo = edges.min(axis=1)
        hi = edges.max(axis=1)
        codes = lo * n + hi
        order = np.argsort(codes, kind="stable")
        codes = codes[order]
        if codes.size and np.any(np.diff(codes) == 0):
            raise ValueError("duplicate edges are not allowed")
        edges = np.column_stack([lo[order], hi[order]])
        edges.setflags(write=False)
        m = edges.shape[0]
        data = np.ones(2 * m)
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        adj = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        deg = np.asarray(adj.sum(axis=1)).ravel()
        deg.setflags(write=False)
        codes.setflags(write=False)
        return cls(n=n, edges=edges, adjacency=adj, degrees=deg, _edge_codes=codes)

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def max_degree(self):
        return int(self.degrees.max()) if self.n else 0

    def edge_index(self, i, j):
        """Position of edge (i, j) in the edge list; -1 if absent."""
        lo, hi = (i, j) if i < j else (j, i)
        code = lo * self.n + hi
        k = int(np.searchsorted(self._edge_codes, code))
        if k < self.num_edges and self._edge_codes[k] == code:
            return k
        return -1

    def edge_indices(self, pairs):
        """Vectorized ``edge_index`` for an (p, 2) array of pairs."""
        pairs = np.asarray(pairs, dtype=np.int64)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        codes = lo * self.n + hi
        k = np.searchsorted(self._edge_codes, codes)
        k = np.minimum(k, max(self.num_edges - 1, 0))
        found = self.num_edges > 0
        ok = found & (self._edge_codes[k] == codes) if self.num_edges else np.zeros(len(codes), bool)
        out = np.where(ok, k, -1)
        return out

    def neighbors(self, i):
        """Sorted neighbor ids of vertex i."""
        return self.adjacency.indices[self.adjacency.indptr[i]:self.adjacency.indptr[i + 1]]


def _check_node_vector(g, u):
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (g.n,):
        raise ValueError(f"node vector has length {u.shape}, expected ({g.n},)")
    return u


def _check_edge_vector(g, w):
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (g.num_edges,):
        raise ValueError(f"edge vector has length {w.shape}, expected ({g.num_edges},)")
    return w


def laplacian_apply(g, u):
    """Apply the graph Laplacian: (A u)_i = d_i u_i - sum of neighbor values.

    The product is formed from the adjacency structure; no Laplacian matrix
    is assembled.  Satisfies A @ ones == 0.
    """
    u = _check_node_vector(g, u)
    return g.degrees * u - g.adjacency.dot(u)


def incidence_apply(g, u):
    """Discrete gradient: (B u)_k = u_i - u_j for edge k = (i, j), i < j."""
    u = _check_node_vector(g, u)
    return u[g.edges[:, 0]] - u[g.edges[:, 1]]


def incidence_transpose_apply(g, w):
    """Adjoint of the discrete gradient, so that B^T B u = A u."""
    w = _check_edge_vector(g, w)
    out = np.bincount(g.edges[:, 0], weights=w, minlength=g.n)
    out -= np.bincount(g.edges[:, 1], weights=w, minlength=g.n)
    return out


def connected_components(g):
    """Labels in [0, c) such that vertices share a label iff connected."""
    if g.num_edges == 0:
        return np.arange(g.n, dtype=np.int64)
    _, labels = _cc(g.adjacency, directed=False)
    return labels.astype(np.int64)


def is_connected(g):
    return g.n <= 1 or connected_components(g).max() == 0


_MM_HEADER = "%%MatrixMarket matrix coordinate pattern symmetric"


def save_graph(g, path):
    """Write the graph in Matrix Market pattern/symmetric coordinates (1-based)."""
    with open(path, "w") as f:
        f.write(_MM_HEADER + "\n")
        f.write(f"{g.n} {g.n} {g.num_edges}\n")
        for i, j in g.edges:
            # store lower-triangular (row > col) as customary for symmetric files
            f.write(f"{j + 1} {i + 1}\n")


def load_graph(path):
    """Read a Matrix Market coordinate pattern symmetric file as a Graph.

    Self loops and non-symmetric headers are rejected.
    """
    with open(path) as f:
        header = f.readline()
        if not header.startswith("%%MatrixMarket"):
            raise GraphFormatError("missing MatrixMarket header")
        tokens = header.lower().split()
        if "coordinate" not in tokens or "pattern" not in tokens or "symmetric" not in tokens:
            raise GraphFormatError(f"unsupported MatrixMarket header: {header.strip()!r}")
        line = f.readline()
        while line.startswith("%"):
            line = f.readline()
        try:
            rows, cols, nnz = (int(t) for t in line.split())
        except Exception as exc:
            raise GraphFormatError(f"bad size line: {line.strip()!r}") from exc
        if rows != cols:
            raise GraphFormatError("graph matrix must be square")
        edges = []
        for _ in range(nnz):
            line = f.readline()
            if not line:
                raise GraphFormatError("truncated file")
            parts = line.split()
            if len(parts) < 2:
                raise GraphFormatError(f"bad entry line: {line.strip()!r}")
            i, j = int(parts[0]) - 1, int(parts[1]) - 1
            if i == j:
                raise GraphFormatError(f"self loop at vertex {i + 1}")
            edges.append((i, j))
    return Graph.from_edges(rows, edges)
