"""Deterministic generators for the test graphs.

Structured families are hypercubic grids, optionally masked (L-shape in 2d,
one-octant-removed cube in 3d).  The unstructured family perturbs a square
lattice by random vectors of length h/2 and takes the edges of a Delaunay
triangulation of the perturbed points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from .errors import BuildError
from .graphs import Graph, is_connected

__all__ = [
    "GridSpec",
    "grid_graph",
    "lshape_graph",
    "fichera_graph",
    "unstructured_2d",
]


@dataclass(frozen=True)
class GridSpec:
    """Hypercubic grid: per-dimension sizes plus an optional retention mask.

    ``mask(coords) -> bool array`` selects which lattice points are kept;
    the retained set must stay connected.
    """

    dims: tuple
    mask: object = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.dims) == 0 or any(int(s) < 1 for s in self.dims):
            raise ValueError(f"grid sizes must be positive, got {self.dims}")
        object.__setattr__(self, "dims", tuple(int(s) for s in self.dims))


def _lattice_coords(dims):
    grids = np.meshgrid(*[np.arange(s) for s in dims], indexing="ij")
    return np.column_stack([g.ravel() for g in grids]).astype(np.int64)


def grid_graph(spec):
    """Graph of a (masked) hypercubic grid plus its lattice coordinate map.

    Vertices are the retained lattice points; edges join points that differ
    by one unit vector with both endpoints retained.

    Returns
    -------
    (Graph, ndarray of shape (n, m)) : the graph and 0-based lattice
    coordinates of each vertex.
    """
    if not isinstance(spec, GridSpec):
        spec = GridSpec(tuple(spec))
    coords = _lattice_coords(spec.dims)
    if spec.mask is not None:
        keep = np.asarray(spec.mask(coords), dtype=bool)
        coords = coords[keep]
    if coords.shape[0] == 0:
        raise BuildError("mask retains no vertices")
    m = len(spec.dims)
    strides = np.ones(m, dtype=np.int64)
    for a in range(m - 2, -1, -1):
        strides[a] = strides[a + 1] * spec.dims[a + 1]
    codes = coords @ strides
    order = np.argsort(codes)
    coords = coords[order]
    codes = codes[order]
    index = {int(c): k for k, c in enumerate(codes)}
    edges = []
    for a in range(m):
        nbr = coords.copy()
        nbr[:, a] += 1
        valid = nbr[:, a] < spec.dims[a]
        nbr_codes = nbr @ strides
        for k in np.nonzero(valid)[0]:
            j = index.get(int(nbr_codes[k]))
            if j is not None:
                edges.append((k, j))
    g = Graph.from_edges(coords.shape[0], edges)
    if not is_connected(g):
        raise BuildError("masked grid is disconnected")
    coords.setflags(write=False)
    return g, coords


def lshape_graph(n):
    """[n, n] grid with the closed upper-right quadrant of side n/2 removed.

    Retains exactly (3/4) n^2 vertices.
    """
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    half = n // 2

    def mask(coords):
        return ~((coords[:, 0] >= half) & (coords[:, 1] >= half))

    return grid_graph(GridSpec((n, n), mask=mask))


def fichera_graph(n):
    """[n, n, n] grid with the closed corner octant of side n/2 removed.

    Retains exactly (7/8) n^3 vertices.
    """
    if n % 2:
        raise ValueError(f"n must be even, got {n}")
    half = n // 2

    def mask(coords):
        return ~((coords[:, 0] >= half) & (coords[:, 1] >= half) & (coords[:, 2] >= half))

    return grid_graph(GridSpec((n, n, n), mask=mask))


def unstructured_2d(n, seed):
    """Delaunay graph of a randomly perturbed n-by-n unit-square lattice.

    Each lattice point moves by a uniformly random direction of length
    exactly h/2 with h = 1/(n-1); points may leave the unit square.  The
    result is deterministic per seed and always connected.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    h = 1.0 / (n - 1)
    base = _lattice_coords((n, n)).astype(np.float64) * h
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=base.shape[0])
    pts = base + 0.5 * h * np.column_stack([np.cos(angles), np.sin(angles)])
    tri = Delaunay(pts)
    s = tri.simplices
    pairs = np.vstack([s[:, [0, 1]], s[:, [1, 2]], s[:, [0, 2]]])
    g = Graph.from_edges(pts.shape[0], _unique_pairs(pairs))
    return g


def _unique_pairs(pairs):
    lo = pairs.min(axis=1)
    hi = pairs.max(axis=1)
    codes = lo.astype(np.int64) * (hi.max() + 1) + hi
    _, keep = np.unique(codes, return_index=True)
    return np.column_stack([lo[keep], hi[keep]])
