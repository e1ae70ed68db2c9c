"""Input validation helpers for the estimator-style API."""

from __future__ import annotations

import numpy as np

from .errors import NotFittedError
from .graphs import Graph, is_connected

__all__ = [
    "check_graph",
    "check_connected_graph",
    "check_node_vector",
    "check_is_fitted",
]


def check_graph(g):
    if not isinstance(g, Graph):
        raise TypeError(f"expected a Graph, got {type(g).__name__}")
    return g


def check_connected_graph(g):
    check_graph(g)
    if not is_connected(g):
        raise ValueError("graph must be connected")
    return g


def check_node_vector(g, u, name="u"):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.shape[0] != g.n:
        raise ValueError(f"{name} must be a 1-d array of length {g.n}, "
                         f"got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError(f"{name} contains non-finite entries")
    return u


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(
            f"{type(estimator).__name__} is not fitted yet; call fit first")
