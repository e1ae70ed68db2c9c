"""Estimator-style front end: fit a hierarchy on a graph, then solve.

``AmliSolver`` follows the scikit-learn parameter conventions (constructor
arguments become attributes, ``get_params``/``set_params`` round-trip, and
fitted state lives in trailing-underscore attributes) so it composes with
pipeline-style tooling, while ``transform`` exposes the preconditioner
action and ``aslinearoperator`` plugs into scipy's iterative solvers.
"""

from __future__ import annotations

import inspect

import numpy as np

from .graphs import laplacian_apply
from .hierarchy import build_hierarchy
from .krylov import pcg_solve, rates
from .precond import AmliPreconditioner
from .validation import check_connected_graph, check_is_fitted, check_node_vector

__all__ = ["AmliSolver"]


class AmliSolver:
    """Matching-based multilevel preconditioned CG solver for graph Laplacians.

    Parameters
    ----------
    strategy : {"structured", "random"}
        Coarsening strategy; structured requires lattice coordinates at fit.
    variant : {"ordinary", "modified"}
        Ordinary uses exact (or tight CG) pair-block solves and the full
        parameter recursion; modified uses single-sweep weighted Richardson
        smoothing and the recursion without its logarithmic correction.
    sigma_mode : str
        Coarse-correction scaling rule; "auto" resolves per strategy/variant.
    seed : int
        Seed for random coarsening.
    tol : float
        Relative reduction target for ``solve``.
    maxiter : int
        Iteration cap for ``solve``.
    """

    def __init__(self, strategy="structured", variant="ordinary",
                 sigma_mode="auto", seed=0, tol=1e-10, maxiter=500):
        self.strategy = strategy
        self.variant = variant
        self.sigma_mode = sigma_mode
        self.seed = seed
        self.tol = tol
        self.maxiter = maxiter

    # -- scikit-learn parameter plumbing ---------------------------------
    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"invalid parameter {key!r} for {type(self).__name__}")
            setattr(self, key, value)
        return self

    # -- estimator API ----------------------------------------------------
    def fit(self, graph, coords=None):
        """Build the hierarchy and the preconditioner for ``graph``."""
        check_connected_graph(graph)
        hierarchy = build_hierarchy(graph, self.strategy, variant=self.variant,
                                    seed=self.seed, coords=coords,
                                    sigma_mode=self.sigma_mode)
        self.graph_ = graph
        self.hierarchy_ = hierarchy
        self.preconditioner_ = AmliPreconditioner(hierarchy)
        return self

    def transform(self, r):
        """Apply the inverse preconditioner to one or more residual vectors."""
        check_is_fitted(self, "preconditioner_")
        r = np.asarray(r, dtype=np.float64)
        if r.ndim == 1:
            return self.preconditioner_.apply(check_node_vector(self.graph_, r, "r"))
        return np.stack([self.preconditioner_.apply(
            check_node_vector(self.graph_, row, "r")) for row in r])

    def solve(self, f, x_true=None):
        """Run preconditioned CG on A x = f; returns x and stores ``report_``."""
        check_is_fitted(self, "preconditioner_")
        f = check_node_vector(self.graph_, f, "f")
        x, report = pcg_solve(lambda u: laplacian_apply(self.graph_, u),
                              self.preconditioner_.apply, f,
                              tol=self.tol, x_true=x_true, maxiter=self.maxiter)
        rates(report, self.hierarchy_.zeta_finest)
        self.report_ = report
        return x

    def aslinearoperator(self):
        check_is_fitted(self, "preconditioner_")
        return self.preconditioner_.aslinearoperator()

    @property
    def smoother_(self):
        check_is_fitted(self, "preconditioner_")
        return self.preconditioner_.smoother
