"""Vertex partitions from matchings and the induced quotient graph.

A partition splits the vertex set into disjoint connected aggregates; the
ones produced here are matched pairs (edges of the graph) plus singletons.
The quotient graph has one vertex per aggregate and one unweighted edge
wherever at least one fine edge crosses between two aggregates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph

__all__ = [
    "Partition",
    "aligned_matching",
    "random_maximal_matching",
    "coarse_graph",
    "edge_multiplicity",
]


@dataclass(frozen=True)
class Partition:
    """Disjoint aggregates covering the vertex set of a graph.

    Attributes
    ----------
    aggregates : tuple of tuples
        Vertex sets, each inducing a connected subgraph.
    vertex_to_aggregate : ndarray
        Inverse map from vertex id to aggregate index.
    pairs : ndarray of shape (p, 2)
        Aggregates of size exactly two, ordered (i, j) with i < j; each must
        be an edge of the graph.
    singletons : ndarray
        Vertices forming one-element aggregates.
    """

    aggregates: tuple
    vertex_to_aggregate: np.ndarray = field(repr=False)
    pairs: np.ndarray = field(repr=False)
    pair_aggregate_ids: np.ndarray = field(repr=False)
    singletons: np.ndarray = field(repr=False)

    @classmethod
    def from_aggregates(cls, g, aggregates, validate=True):
        aggregates = tuple(tuple(sorted(int(v) for v in agg)) for agg in aggregates)
        v2a = np.full(g.n, -1, dtype=np.int64)
        for a, agg in enumerate(aggregates):
            if len(agg) == 0:
                raise ValueError("empty aggregate")
            for v in agg:
                if v < 0 or v >= g.n:
                    raise ValueError(f"vertex {v} out of range")
                if v2a[v] != -1:
                    raise ValueError(f"vertex {v} in two aggregates")
                v2a[v] = a
        if np.any(v2a < 0):
            raise ValueError("aggregates do not cover all vertices")
        pairs = [agg for agg in aggregates if len(agg) == 2]
        pair_ids = [a for a, agg in enumerate(aggregates) if len(agg) == 2]
        pairs = np.asarray(pairs, dtype=np.int64).reshape(len(pairs), 2)
        if validate:
            if pairs.shape[0] and np.any(g.edge_indices(pairs) < 0):
                raise ValueError("a size-2 aggregate is not an edge of the graph")
            for agg in aggregates:
                if len(agg) > 2 and not _induced_connected(g, agg):
                    raise ValueError(f"aggregate {agg} is not connected")
        singles = np.asarray([agg[0] for agg in aggregates if len(agg) == 1], dtype=np.int64)
        v2a.setflags(write=False)
        return cls(aggregates=aggregates, vertex_to_aggregate=v2a, pairs=pairs,
                   pair_aggregate_ids=np.asarray(pair_ids, dtype=np.int64),
                   singletons=singles)

    @property
    def num_aggregates(self):
        return len(self.aggregates)

    @property
    def num_pairs(self):
        return self.pairs.shape[0]

    def sizes(self):
        return np.asarray([len(a) for a in self.aggregates], dtype=np.int64)


def _induced_connected(g, agg):
    agg = set(agg)
    start = next(iter(agg))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in g.neighbors(v):
            w = int(w)
            if w in agg and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(agg)


def aligned_matching(g, coords, axis):
    """Match lattice points with their +1 neighbor along ``axis``.

    A vertex whose 0-based coordinate along ``axis`` is even is paired with
    the vertex one step up along that axis when it exists; everything left
    over becomes a singleton.  On a full grid with even extent the matching
    is perfect.
    """
    coords = np.asarray(coords, dtype=np.int64)
    if coords.shape[0] != g.n:
        raise ValueError("coordinate map does not match vertex count")
    m = coords.shape[1]
    if axis < 0 or axis >= m:
        raise ValueError(f"axis {axis} out of range for {m}-dimensional grid")
    extent = int(coords[:, axis].max()) + 1
    if extent % 2:
        raise ValueError(f"extent {extent} along axis {axis} is odd")
    key = {tuple(c): k for k, c in enumerate(coords.tolist())}
    paired = np.zeros(g.n, dtype=bool)
    aggregates = []
    for v in range(g.n):
        c = coords[v]
        if c[axis] % 2 == 0:
            cp = c.copy()
            cp[axis] += 1
            w = key.get(tuple(cp.tolist()))
            if w is not None:
                aggregates.append((v, w))
                paired[v] = paired[w] = True
    for v in range(g.n):
        if not paired[v]:
            aggregates.append((v,))
    return Partition.from_aggregates(g, aggregates)


def random_maximal_matching(g, seed):
    """Greedy maximal matching over a seed-shuffled edge order.

    No remaining edge has both endpoints unmatched; unmatched vertices
    become singletons.  Deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    order = rng.permutation(g.num_edges)
    matched = np.zeros(g.n, dtype=bool)
    aggregates = []
    for k in order:
        i, j = g.edges[k]
        if not matched[i] and not matched[j]:
            matched[i] = matched[j] = True
            aggregates.append((int(i), int(j)))
    for v in range(g.n):
        if not matched[v]:
            aggregates.append((v,))
    return Partition.from_aggregates(g, aggregates)


def _cross_edges(g, p):
    """Aggregate index pairs (a < b) for every fine edge crossing aggregates."""
    a = p.vertex_to_aggregate[g.edges[:, 0]]
    b = p.vertex_to_aggregate[g.edges[:, 1]]
    ext = a != b
    lo = np.minimum(a[ext], b[ext])
    hi = np.maximum(a[ext], b[ext])
    return lo, hi


def coarse_graph(g, p):
    """Quotient graph: one vertex per aggregate, deduplicated crossing edges."""
    if p.vertex_to_aggregate.shape[0] != g.n:
        raise ValueError("partition does not match graph")
    lo, hi = _cross_edges(g, p)
    nc = p.num_aggregates
    if lo.size == 0:
        return Graph.from_edges(nc, np.zeros((0, 2), dtype=np.int64))
    codes = lo * nc + hi
    uniq = np.unique(codes)
    edges = np.column_stack([uniq // nc, uniq % nc])
    return Graph.from_edges(nc, edges)


def edge_multiplicity(g, p):
    """Fine-edge count behind each coarse edge, aligned with coarse_graph order.

    Returns
    -------
    (Graph, ndarray) : the quotient graph and, per coarse edge, the number
    of fine edges joining the two aggregates.
    """
    lo, hi = _cross_edges(g, p)
    nc = p.num_aggregates
    if lo.size == 0:
        return Graph.from_edges(nc, np.zeros((0, 2), dtype=np.int64)), np.zeros(0, dtype=np.int64)
    codes = lo * nc + hi
    uniq, counts = np.unique(codes, return_counts=True)
    edges = np.column_stack([uniq // nc, uniq % nc])
    gc = Graph.from_edges(nc, edges)
    # Graph.from_edges sorts lexicographically, matching np.unique order.
    return gc, counts.astype(np.int64)
