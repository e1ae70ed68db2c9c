"""Stability analysis of the piecewise-constant projection.

``project_Q`` is the l2-orthogonal projection onto vectors constant on each
aggregate.  The edge-space operator ``Pi`` intertwines it with the discrete
gradient, ``B Q = Pi B``, so the energy seminorm of Q is controlled by the
l2 norm of Pi.  Two constructions are provided: a closed form for matching
partitions (rows carry a single 1 and up to two +-1/2 entries) and a general
one that solves a small augmented Laplacian system on each aggregate.  The
sign conventions are fixed by the global edge orientation (small endpoint to
large) and are verified wholesale by the commutation check.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graphs import incidence_apply
from .oracle import dense_laplacian, rayleigh_sup

__all__ = [
    "project_Q",
    "q_matrix_dense",
    "build_pi_matching",
    "build_pi_general",
    "pi_norm_bounds",
    "q_energy_norm",
    "check_commutation",
]


def project_Q(p, v):
    """Replace each entry of v by the mean over its aggregate."""
    v = np.asarray(v, dtype=np.float64)
    ids = p.vertex_to_aggregate
    sizes = np.bincount(ids, minlength=p.num_aggregates).astype(np.float64)
    sums = np.bincount(ids, weights=v, minlength=p.num_aggregates)
    return (sums / sizes)[ids]


def q_matrix_dense(p, n):
    """Dense matrix of project_Q (the aggregate-mean projector)."""
    Q = np.zeros((n, n))
    for agg in p.aggregates:
        w = 1.0 / len(agg)
        for i in agg:
            for j in agg:
                Q[i, j] = w
    return Q


def _pair_membership(p, n):
    """Per-vertex pair row index (or -1) for matching partitions."""
    member = np.full(n, -1, dtype=np.int64)
    for k, (i, j) in enumerate(p.pairs):
        member[i] = k
        member[j] = k
    return member


def build_pi_matching(g, p):
    """Closed-form intertwining operator for a matching partition.

    Rows of matched edges are zero.  The row of an external edge k = (i, j)
    has a 1 in column k and, for each endpoint lying in a matched pair, a
    +-1/2 entry in that pair's edge column.  Returns an |E| x |E| CSR matrix.
    """
    if any(len(a) > 2 for a in p.aggregates):
        raise ValueError("partition contains aggregates larger than a pair")
    member = _pair_membership(p, g.n)
    pair_edge = g.edge_indices(p.pairs) if p.num_pairs else np.zeros(0, dtype=np.int64)
    if p.num_pairs and np.any(pair_edge < 0):
        raise ValueError("a matched pair is not an edge of the graph")
    rows, cols, vals = [], [], []
    v2a = p.vertex_to_aggregate
    for k in range(g.num_edges):
        i, j = g.edges[k]
        if v2a[i] == v2a[j]:
            continue
        rows.append(k)
        cols.append(k)
        vals.append(1.0)
        for x, s in ((i, 1.0), (j, -1.0)):
            pr = member[x]
            if pr < 0:
                continue
            head = p.pairs[pr, 1]
            rows.append(k)
            cols.append(int(pair_edge[pr]))
            vals.append(s * (0.5 if x == head else -0.5))
    m = g.num_edges
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


def _boundary_coefficients(g, agg, max_aggregate_size):
    """Per-endpoint row coefficients over an aggregate's internal edges.

    For aggregate vertices ``agg`` the coefficient vector of local vertex l
    is ``B_loc (A_loc + e_l e_l^T)^{-1} ones / |agg|`` where A_loc is the
    Laplacian of the induced subgraph; pairing it with internal edge values
    recovers the aggregate mean from the endpoint value.
    """
    size = len(agg)
    if size > max_aggregate_size:
        raise ValueError(f"aggregate of size {size} exceeds cap {max_aggregate_size}")
    local = {v: l for l, v in enumerate(agg)}
    internal = [k for k in range(g.num_edges)
                if g.edges[k, 0] in local and g.edges[k, 1] in local]
    A = np.zeros((size, size))
    Bl = np.zeros((len(internal), size))
    for r, k in enumerate(internal):
        a, b = (local[int(g.edges[k, 0])], local[int(g.edges[k, 1])])
        A[a, a] += 1.0
        A[b, b] += 1.0
        A[a, b] -= 1.0
        A[b, a] -= 1.0
        Bl[r, a] = 1.0
        Bl[r, b] = -1.0
    coeffs = {}
    ones = np.ones(size)
    for v, l in local.items():
        M = A.copy()
        M[l, l] += 1.0
        x = np.linalg.solve(M, ones)
        coeffs[v] = Bl @ x / size
    return internal, coeffs


def build_pi_general(g, p, max_aggregate_size=8):
    """Intertwining operator for any partition into connected aggregates.

    Agrees entrywise with ``build_pi_matching`` on matching partitions.  Each
    external edge row combines the endpoint coefficient vectors of the two
    aggregates it joins (positive for the smaller endpoint's aggregate,
    negative for the other) with a 1 in its own column.
    """
    v2a = p.vertex_to_aggregate
    per_agg = {}
    for a, agg in enumerate(p.aggregates):
        if len(agg) > 1:
            per_agg[a] = _boundary_coefficients(g, agg, max_aggregate_size)
    rows, cols, vals = [], [], []
    for k in range(g.num_edges):
        i, j = g.edges[k]
        if v2a[i] == v2a[j]:
            continue
        rows.append(k)
        cols.append(k)
        vals.append(1.0)
        for x, s in ((int(i), 1.0), (int(j), -1.0)):
            a = int(v2a[x])
            if a not in per_agg:
                continue
            internal, coeffs = per_agg[a]
            c = coeffs[x]
            for e, val in zip(internal, c):
                if val != 0.0:
                    rows.append(k)
                    cols.append(e)
                    vals.append(s * val)
    m = g.num_edges
    M = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
    M.sum_duplicates()
    return M


def pi_norm_bounds(Pi, d):
    """Exact operator norms of Pi and bounds on the spectral radius of Pi Pi^T.

    Returns a dict with ``inf_norm`` (max absolute row sum), ``one_norm``
    (max absolute column sum), their product, and the Gershgorin bound
    computed as the max absolute row sum of Pi Pi^T.
    """
    Pi = Pi.tocsr()
    absPi = abs(Pi)
    ones_r = np.asarray(absPi.sum(axis=1)).ravel()
    ones_c = np.asarray(absPi.sum(axis=0)).ravel()
    inf_norm = float(ones_r.max()) if ones_r.size else 0.0
    one_norm = float(ones_c.max()) if ones_c.size else 0.0
    PPt = (Pi @ Pi.T).tocsr()
    gersh = float(abs(PPt).sum(axis=1).max()) if PPt.shape[0] else 0.0
    return {
        "inf_norm": inf_norm,
        "one_norm": one_norm,
        "product_bound": inf_norm * one_norm,
        "gershgorin_bound": gersh,
        "max_degree": int(d),
    }


def q_energy_norm(g, p, cap=2000):
    """Squared energy seminorm of the projection: sup (A Q v, Q v)/(A v, v).

    Solved densely as a generalized eigenproblem deflated against the
    constant vector; refuses graphs above ``cap`` vertices (use the
    Gershgorin bound from ``pi_norm_bounds`` at scale).
    """
    if g.n > cap:
        raise ValueError(
            f"n = {g.n} exceeds the dense cap {cap}; "
            "use the gershgorin_bound estimate instead")
    A = dense_laplacian(g)
    Q = q_matrix_dense(p, g.n)
    N = Q @ A @ Q
    return rayleigh_sup(N, A, np.ones(g.n))


def check_commutation(g, p, Pi, trials=100, seed=0):
    """Max over random unit vectors of ||B(Qv) - Pi(Bv)||_inf.

    A valid intertwining operator keeps this at rounding level.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        v = rng.standard_normal(g.n)
        v /= np.linalg.norm(v)
        lhs = incidence_apply(g, project_Q(p, v))
        rhs = Pi @ incidence_apply(g, v)
        resid = float(np.abs(lhs - rhs).max()) if g.num_edges else 0.0
        worst = max(worst, resid)
    return worst
