"""Multilevel hierarchies built from repeated matching.

Each level bundles a graph, a matching partition, the aggregation map P
(columns e_i + e_j for pairs, e_i for singletons), the complement map Y
(columns e_i - e_j for pairs), the coarse-edge multiplicities, a scaling
``sigma`` for the coarse correction, and the spectral parameter ``theta``
feeding the level's stabilization polynomial.  The coarse operator is always
the unweighted Laplacian of the quotient graph, not P^T A P.

Two coarsening strategies are provided: ``structured`` (aligned matching on
lattice coordinates, exhausting one dimension at a time until the grid is a
path) and ``random`` (greedy random maximal matching for about half of
log2(n) levels).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import BuildError
from .graphs import Graph, is_connected
from .matching import (Partition, aligned_matching, edge_multiplicity,
                       random_maximal_matching)
from .stability import build_pi_matching, pi_norm_bounds

__all__ = [
    "HierarchyLevel",
    "Hierarchy",
    "build_hierarchy",
    "build_transfer_maps",
    "sigma_estimate",
    "theta_schedule",
    "amli_poly",
]

SIGMA_MODES = ("theory-grid", "theory-general", "modified-grid", "ratio")


@dataclass(frozen=True)
class HierarchyLevel:
    """One coarsening step: fine graph plus transfer data to the next level."""

    graph: Graph
    partition: Partition
    P: sp.csr_matrix = field(repr=False)
    Y: sp.csr_matrix = field(repr=False)
    sigma: float
    theta: float
    multiplicity: np.ndarray = field(repr=False)
    coords: np.ndarray = field(default=None, repr=False)


@dataclass(frozen=True)
class Hierarchy:
    """Level stack ordered finest first; the coarsest graph is solved directly."""

    levels: tuple
    coarsest_graph: Graph
    thetas: np.ndarray
    c_g: float
    variant: str
    sigma_mode: str
    strategy: str

    @property
    def num_levels(self):
        """Total level count including the direct-solve coarsest level."""
        return len(self.levels) + 1

    @property
    def theta_finest(self):
        return float(self.thetas[-1])

    @property
    def zeta_finest(self):
        return 1.0 / self.theta_finest

    def summary(self):
        rows = []
        for lvl in self.levels:
            rows.append({
                "n": lvl.graph.n,
                "edges": lvl.graph.num_edges,
                "pairs": int(lvl.partition.num_pairs),
                "sigma": float(lvl.sigma),
                "theta": float(lvl.theta),
            })
        rows.append({
            "n": self.coarsest_graph.n,
            "edges": self.coarsest_graph.num_edges,
            "pairs": 0,
            "sigma": float("nan"),
            "theta": float(self.thetas[0]),
        })
        return rows


def build_transfer_maps(g, p):
    """Sparse aggregation map P and complement map Y for a matching partition.

    P is n x (number of aggregates) with unit entries over each aggregate;
    Y is n x (number of pairs) with +1 at the smaller and -1 at the larger
    endpoint of each matched pair.  The columns of (Y, P) are mutually
    orthogonal.
    """
    n = g.n
    rows = []
    cols = []
    vals = []
    for a, agg in enumerate(p.aggregates):
        for v in agg:
            rows.append(v)
            cols.append(a)
            vals.append(1.0)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(n, p.num_aggregates))
    if p.num_pairs:
        ii = p.pairs[:, 0]
        jj = p.pairs[:, 1]
        rows = np.concatenate([ii, jj])
        cols = np.concatenate([np.arange(p.num_pairs)] * 2)
        vals = np.concatenate([np.ones(p.num_pairs), -np.ones(p.num_pairs)])
        Y = sp.csr_matrix((vals, (rows, cols)), shape=(n, p.num_pairs))
    else:
        Y = sp.csr_matrix((n, 0))
    return P, Y


def sigma_estimate(level, mode, finest_n=None):
    """Scaling between P^T A P and the unweighted coarse Laplacian.

    Modes: ``theory-grid`` (2), ``theory-general`` (4), ``modified-grid``
    (2 - 1/(2 log2 N) with N the finest vertex count), and ``ratio`` (max
    coarse-edge multiplicity, which bounds the sharp constant because the
    coarse off-diagonals are all -1).
    """
    if mode == "theory-grid":
        return 2.0
    if mode == "theory-general":
        return 4.0
    if mode == "modified-grid":
        N = finest_n if finest_n is not None else level.graph.n
        if N < 2:
            raise ValueError("modified-grid scaling needs N >= 2")
        return 2.0 - 1.0 / (2.0 * math.log2(N))
    if mode == "ratio":
        mult = level.multiplicity
        return float(mult.max()) if mult.size else 1.0
    raise ValueError(f"unknown sigma mode {mode!r}")


def theta_schedule(c_g, num_levels, drop_log_term=False):
    """Per-level spectral lower bounds theta_1..theta_J.

    theta_1 = 1 and theta_{k+1} = 4 theta_k / (c (1 + theta_k)^2); with
    ``drop_log_term`` the reciprocal recursion omits its 1/zeta term, i.e.
    zeta_{k+1} = (c/4)(zeta_k + 2).
    """
    if not 1.0 <= c_g <= 4.0:
        raise ValueError(f"c_g must lie in [1, 4], got {c_g}")
    if num_levels < 1:
        raise ValueError("need at least one level")
    thetas = [1.0]
    for _ in range(num_levels - 1):
        th = thetas[-1]
        if drop_log_term:
            thetas.append(4.0 * th / (c_g * (1.0 + 2.0 * th)))
        else:
            thetas.append(4.0 * th / (c_g * (1.0 + th) ** 2))
    return np.asarray(thetas)


def amli_poly(theta):
    """Coefficients (a, b) of the stabilization polynomial q(t) = a + b t.

    q(t) = 4/(theta+1) (1 - t/(theta+1)); t q(t) peaks at exactly 1 on
    [theta, 1] and takes equal values at both interval ends.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    a = 4.0 / (theta + 1.0)
    b = -4.0 / (theta + 1.0) ** 2
    return a, b


def _extents(coords):
    return coords.max(axis=0).astype(np.int64) + 1


def _choose_axis(coords, input_was_1d):
    """Lowest-indexed axis with even extent > 1; None when coarsening stops.

    Multi-dimensional grids coarsen until only one dimension remains, which
    is then solved directly; grids that start one-dimensional coarsen down
    to two vertices.
    """
    ext = _extents(coords)
    live = np.nonzero(ext > 1)[0]
    if live.size == 0:
        return None
    if live.size == 1:
        if not input_was_1d:
            return None
        axis = int(live[0])
        if ext[axis] <= 2 or ext[axis] % 2:
            return None
        return axis
    for axis in live:
        if ext[axis] % 2 == 0:
            return int(axis)
    return None


def _coarse_coords(p, coords, axis):
    out = np.empty((p.num_aggregates, coords.shape[1]), dtype=np.int64)
    for a, agg in enumerate(p.aggregates):
        c = coords[agg[0]].copy()
        c[axis] //= 2
        out[a] = c
    return out


def build_hierarchy(g, strategy, variant="ordinary", seed=0, coords=None,
                    sigma_mode="auto", num_levels=None):
    """Coarsen a connected graph into a multilevel stack.

    Parameters
    ----------
    g : Graph
        Connected fine graph.
    strategy : {"structured", "random"}
        Aligned matching on lattice coordinates, or seeded random maximal
        matching for about log2(n)/2 levels.
    variant : {"ordinary", "modified"}
        Selects the spectral-parameter recursion (the modified variant drops
        the logarithmic correction) and the default scaling mode.
    coords : ndarray, optional
        Lattice coordinates; required for the structured strategy.
    sigma_mode : str
        One of ``theory-grid``, ``theory-general``, ``modified-grid``,
        ``ratio`` or ``auto``.
    num_levels : int, optional
        Override for the number of matching levels (random strategy only).
    """
    if variant not in ("ordinary", "modified"):
        raise ValueError(f"unknown variant {variant!r}")
    if g.n < 2:
        raise BuildError("hierarchy needs at least two vertices")
    if not is_connected(g):
        raise BuildError("graph must be connected")
    if sigma_mode == "auto":
        if strategy == "structured":
            sigma_mode = "theory-grid" if variant == "ordinary" else "modified-grid"
        else:
            sigma_mode = "ratio"
    if sigma_mode not in SIGMA_MODES:
        raise ValueError(f"unknown sigma mode {sigma_mode!r}")

    finest_n = g.n
    raw_levels = []
    if strategy == "structured":
        if coords is None:
            raise ValueError("structured coarsening needs lattice coordinates")
        coords = np.asarray(coords, dtype=np.int64)
        input_was_1d = int((_extents(coords) > 1).sum()) <= 1
        cur_g, cur_coords = g, coords
        while True:
            axis = _choose_axis(cur_coords, input_was_1d)
            if axis is None:
                break
            p = aligned_matching(cur_g, cur_coords, axis)
            if p.num_pairs == 0:
                raise BuildError("coarsening stalled: no matched pair found")
            gc, mult = edge_multiplicity(cur_g, p)
            raw_levels.append((cur_g, p, mult, cur_coords))
            cur_g, cur_coords = gc, _coarse_coords(p, cur_coords, axis)
        if not raw_levels and not input_was_1d:
            raise BuildError("coarsening stalled: no even extent to match")
        coarsest = cur_g
    elif strategy == "random":
        ss = np.random.SeedSequence(seed)
        target = num_levels if num_levels is not None else int(math.log2(g.n)) // 2
        cur_g = g
        children = ss.spawn(max(target, 1))
        for lvl in range(target):
            if cur_g.n < 4:
                break
            p = random_maximal_matching(cur_g, children[lvl])
            if p.num_pairs == 0:
                raise BuildError("coarsening stalled: no matched pair found")
            if p.num_aggregates < 2:
                break
            gc, mult = edge_multiplicity(cur_g, p)
            raw_levels.append((cur_g, p, mult, None))
            cur_g = gc
        coarsest = cur_g
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    if coarsest.n < 2:
        raise BuildError("coarsest level would have fewer than two vertices")

    sigmas = []
    qbounds = []
    for (lg, p, mult, lcoords) in raw_levels:
        stub = HierarchyLevel(graph=lg, partition=p, P=None, Y=None, sigma=1.0,
                              theta=1.0, multiplicity=mult, coords=lcoords)
        sigmas.append(sigma_estimate(stub, sigma_mode, finest_n=finest_n))
        if strategy == "structured":
            qbounds.append(2.0)
        else:
            bounds = pi_norm_bounds(build_pi_matching(lg, p), lg.max_degree)
            qbounds.append(bounds["gershgorin_bound"])

    J = len(raw_levels) + 1
    if raw_levels:
        c_g = max(s * q for s, q in zip(sigmas, qbounds))
        if c_g > 4.0:
            warnings.warn(
                f"two-level bound {c_g:.3g} exceeds 4; clamping the "
                "polynomial schedule to 4", stacklevel=2)
            c_g = 4.0
        c_g = max(c_g, 1.0)
    else:
        c_g = 1.0
    thetas = theta_schedule(c_g, J, drop_log_term=(variant == "modified"))

    levels = []
    for i, (lg, p, mult, lcoords) in enumerate(raw_levels):
        P, Y = build_transfer_maps(lg, p)
        # the level with paper index k uses theta_{k-1} for its coarse polynomial
        theta = float(thetas[J - i - 2])
        levels.append(HierarchyLevel(graph=lg, partition=p, P=P, Y=Y,
                                     sigma=float(sigmas[i]), theta=theta,
                                     multiplicity=mult, coords=lcoords))
    return Hierarchy(levels=tuple(levels), coarsest_graph=coarsest,
                     thetas=thetas, c_g=float(c_g), variant=variant,
                     sigma_mode=sigma_mode, strategy=strategy)
