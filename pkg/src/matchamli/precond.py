"""Two-level cycles and the recursive polynomial-stabilized preconditioner.

The cycle is applied multiplicatively and matrix-free: solve on the span of
the pair-difference columns Y, correct through the aggregation map P with a
scaled coarse action, then solve on span(Y) again.  With exact solves and an
exact coarse inverse this reproduces the block-factorized two-level inverse
transported to node space.

The multilevel preconditioner wraps the coarse action of each level in a
degree-one polynomial of the coarse preconditioned operator (two coarse
visits per level, a W-cycle); the coarsest graph is handled by a dense
eigendecomposition pseudo-inverse.  Every application accumulates a flop
count so the per-cycle complexity can be measured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, splu

from .graphs import laplacian_apply
from .hierarchy import amli_poly
from .oracle import dense_laplacian, eig_sym

__all__ = [
    "SmootherConfig",
    "assemble_ytay",
    "ytay_apply",
    "ytay_solve",
    "TwoLevelOperator",
    "two_level_apply",
    "AmliPreconditioner",
    "operation_count",
]

DIRECT_PAIR_CAP = 4096


@dataclass(frozen=True)
class SmootherConfig:
    """How the pair-block systems (Y^T A Y) x = b are solved.

    ``exact`` factorizes once; ``cg`` iterates to a relative residual;
    ``richardson`` runs a fixed number of sweeps weighted by the reciprocal
    of the assembled matrix's l1 operator norm.  ``auto`` picks exact below
    ``DIRECT_PAIR_CAP`` unknowns and cg(tol) above.
    """

    kind: str = "auto"
    tol: float = 1e-6
    sweeps: int = 1

    def __post_init__(self):
        if self.kind not in ("auto", "exact", "cg", "richardson"):
            raise ValueError(f"unknown smoother kind {self.kind!r}")
        if self.tol <= 0:
            raise ValueError("cg tolerance must be positive")
        if self.sweeps < 1:
            raise ValueError("richardson needs at least one sweep")

    @classmethod
    def exact(cls):
        return cls(kind="exact")

    @classmethod
    def cg(cls, tol=1e-6):
        return cls(kind="cg", tol=tol)

    @classmethod
    def richardson(cls, sweeps=1):
        return cls(kind="richardson", sweeps=sweeps)


class _Counter:
    __slots__ = ("flops",)

    def __init__(self):
        self.flops = 0

    def add(self, k):
        self.flops += int(k)


def assemble_ytay(g, Y):
    """Explicit sparse Y^T A Y for solver setup (weights and factorization)."""
    L = sp.diags(g.degrees) - g.adjacency
    K = (Y.T @ (L @ Y)).tocsr()
    K.sum_duplicates()
    K.sort_indices()
    return K


def ytay_apply(level, x):
    """Matrix-free product (Y^T A Y) x via two transfers and one Laplacian."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (level.Y.shape[1],):
        raise ValueError(f"expected length {level.Y.shape[1]}, got {x.shape}")
    return level.Y.T @ laplacian_apply(level.graph, level.Y @ x)


class _ExactSolver:
    kind = "exact"

    def __init__(self, K, counter):
        self._lu = splu(K.tocsc())
        self._counter = counter
        self.cost = 2 * (self._lu.L.nnz + self._lu.U.nnz)

    def __call__(self, b):
        self._counter.add(self.cost)
        return self._lu.solve(b)


class _CgSolver:
    kind = "cg"

    def __init__(self, K, tol, counter, maxiter=10000):
        self._K = K.tocsr()
        self._tol = tol
        self._counter = counter
        self._maxiter = maxiter
        self._iter_cost = 2 * K.nnz + 10 * K.shape[0]

    def __call__(self, b):
        x = np.zeros_like(b)
        nb2 = float(b @ b)
        if nb2 == 0.0:
            return x
        r = b.copy()
        p = r.copy()
        rs = nb2
        stop = (self._tol ** 2) * nb2
        it = 0
        while rs > stop and it < self._maxiter:
            Kp = self._K @ p
            alpha = rs / float(p @ Kp)
            x += alpha * p
            r -= alpha * Kp
            rs_new = float(r @ r)
            p = r + (rs_new / rs) * p
            rs = rs_new
            it += 1
        self._counter.add(it * self._iter_cost)
        return x


class _RichardsonSolver:
    kind = "richardson"

    def __init__(self, K, sweeps, counter):
        self._K = K.tocsr()
        self.weight = 1.0 / float(abs(K).sum(axis=1).max())
        self._sweeps = sweeps
        self._counter = counter
        self._sweep_cost = 2 * K.nnz + 4 * K.shape[0]

    def __call__(self, b):
        x = self.weight * b
        for _ in range(self._sweeps - 1):
            x += self.weight * (b - self._K @ x)
        self._counter.add(self._sweeps * self._sweep_cost)
        return x


def make_ytay_solver(K, cfg, counter=None):
    counter = counter if counter is not None else _Counter()
    kind = cfg.kind
    if kind == "auto":
        kind = "exact" if K.shape[0] <= DIRECT_PAIR_CAP else "cg"
    if K.shape[0] == 0:
        return lambda b: b
    if kind == "exact":
        return _ExactSolver(K, counter)
    if kind == "cg":
        return _CgSolver(K, cfg.tol, counter)
    return _RichardsonSolver(K, cfg.sweeps, counter)


def ytay_solve(level, b, cfg=SmootherConfig.exact()):
    """Solve (Y^T A Y) x = b per the smoother configuration."""
    b = np.asarray(b, dtype=np.float64)
    K = assemble_ytay(level.graph, level.Y)
    return make_ytay_solver(K, cfg)(b)


class _CoarsestSolver:
    """Dense pseudo-inverse of the coarsest Laplacian, kernel-safe."""

    def __init__(self, g, counter, rtol=1e-10):
        A = dense_laplacian(g)
        w, V = eig_sym(A)
        cut = rtol * max(w.max(), 1.0)
        self._winv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
        self._V = V
        self._counter = counter
        self.cost = 4 * g.n * g.n

    def __call__(self, r):
        self._counter.add(self.cost)
        return self._V @ (self._winv * (self._V.T @ r))


class TwoLevelOperator:
    """Single multiplicative cycle: Y-solve, coarse correction, Y-solve.

    ``coarse_action`` maps a coarse residual to an (approximate) coarse
    Laplacian pseudo-inverse action; it is scaled by 1/sigma internally.
    Residuals with a component along the constant vector are projected out
    and counted in ``projections``.
    """

    def __init__(self, level, coarse_action, smoother=SmootherConfig.exact()):
        self.level = level
        self.coarse_action = coarse_action
        self.counter = _Counter()
        K = assemble_ytay(level.graph, level.Y)
        self.solver = make_ytay_solver(K, smoother, self.counter)
        self.projections = 0

    def __call__(self, r):
        lvl = self.level
        g = lvl.graph
        r = np.asarray(r, dtype=np.float64)
        drift = r.sum() / g.n
        if abs(drift) > 1e-13 * (np.abs(r).max() + 1.0):
            r = r - drift
            self.projections += 1
        z = lvl.Y @ self.solver(lvl.Y.T @ r)
        resid = r - laplacian_apply(g, z)
        z = z + lvl.P @ (self.coarse_action(lvl.P.T @ resid) / lvl.sigma)
        resid = r - laplacian_apply(g, z)
        z = z + lvl.Y @ self.solver(lvl.Y.T @ resid)
        return z


def two_level_apply(level, coarse_action, r, smoother=SmootherConfig.exact()):
    """Convenience wrapper building and applying a TwoLevelOperator once."""
    return TwoLevelOperator(level, coarse_action, smoother)(r)


class _LevelOps:
    __slots__ = ("graph", "coarse_graph", "P", "Pt", "Y", "Yt", "sigma",
                 "poly_a", "poly_b", "solver", "lap_cost", "coarse_lap_cost",
                 "p_cost", "y_cost")

    def __init__(self, level, coarse_graph, smoother, counter):
        self.graph = level.graph
        self.coarse_graph = coarse_graph
        self.P = level.P.tocsr()
        self.Pt = level.P.T.tocsr()
        self.Y = level.Y.tocsr()
        self.Yt = level.Y.T.tocsr()
        self.sigma = level.sigma
        self.poly_a, self.poly_b = amli_poly(level.theta)
        K = assemble_ytay(level.graph, level.Y)
        self.solver = make_ytay_solver(K, smoother, counter)
        self.lap_cost = 2 * self.graph.adjacency.nnz + 2 * self.graph.n
        self.coarse_lap_cost = 2 * coarse_graph.adjacency.nnz + 2 * coarse_graph.n
        self.p_cost = 2 * self.P.nnz
        self.y_cost = 2 * self.Y.nnz


class AmliPreconditioner:
    """Recursive W-cycle preconditioner for a matching hierarchy.

    Applies the inverse of the multilevel preconditioner to node-space
    residuals.  At each level the coarse correction is
    ``(a * w1 + b * w2) / sigma`` with ``w1`` the coarse preconditioner
    applied to the restricted residual and ``w2`` the same preconditioner
    applied to the coarse Laplacian image of ``w1`` -- two coarse visits per
    level.  The coarsest level applies a dense pseudo-inverse, so a hierarchy
    without matching levels reproduces the fine pseudo-inverse exactly.
    """

    def __init__(self, hierarchy, smoother=None):
        self.hierarchy = hierarchy
        if smoother is None:
            smoother = (SmootherConfig.richardson(1)
                        if hierarchy.variant == "modified" else SmootherConfig())
        self.smoother = smoother
        self._counter = _Counter()
        graphs = [lvl.graph for lvl in hierarchy.levels] + [hierarchy.coarsest_graph]
        self._levels = [
            _LevelOps(lvl, graphs[i + 1], smoother, self._counter)
            for i, lvl in enumerate(hierarchy.levels)
        ]
        self._coarsest = _CoarsestSolver(hierarchy.coarsest_graph, self._counter)

    @property
    def n(self):
        return self.hierarchy.levels[0].graph.n if self.hierarchy.levels \
            else self.hierarchy.coarsest_graph.n

    @property
    def flops(self):
        return self._counter.flops

    def reset_flops(self):
        self._counter.flops = 0

    def apply(self, r):
        r = np.asarray(r, dtype=np.float64)
        if r.shape != (self.n,):
            raise ValueError(f"expected residual of length {self.n}")
        return self._apply(0, r)

    __call__ = apply

    def _apply(self, i, r):
        if i == len(self._levels):
            return self._coarsest(r)
        ops = self._levels[i]
        c = self._counter
        z = ops.Y @ ops.solver(ops.Yt @ r)
        c.add(2 * ops.y_cost)
        resid = r - laplacian_apply(ops.graph, z)
        c.add(ops.lap_cost + ops.graph.n)
        rc = ops.Pt @ resid
        c.add(ops.p_cost)
        w1 = self._apply(i + 1, rc)
        w2 = self._apply(i + 1, laplacian_apply(ops.coarse_graph, w1))
        c.add(ops.coarse_lap_cost)
        vc = (ops.poly_a * w1 + ops.poly_b * w2) / ops.sigma
        c.add(3 * ops.coarse_graph.n)
        z = z + ops.P @ vc
        c.add(ops.p_cost + ops.graph.n)
        resid = r - laplacian_apply(ops.graph, z)
        c.add(ops.lap_cost + ops.graph.n)
        z = z + ops.Y @ ops.solver(ops.Yt @ resid)
        c.add(2 * ops.y_cost + ops.graph.n)
        return z

    def aslinearoperator(self):
        n = self.n
        return LinearOperator((n, n), matvec=self.apply, rmatvec=self.apply,
                              dtype=np.float64)


def operation_count(pre, seed=0):
    """Flops of one preconditioner application to a seeded random residual."""
    rng = np.random.default_rng(seed)
    r = rng.standard_normal(pre.n)
    r -= r.mean()
    pre.reset_flops()
    pre.apply(r)
    count = pre.flops
    pre.reset_flops()
    return count
