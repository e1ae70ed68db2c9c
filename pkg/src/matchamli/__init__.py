"""Matching-based algebraic multilevel preconditioning for graph Laplacians."""

from .errors import (BuildError, GraphFormatError,
                     IndefinitePreconditionerError, NotFittedError)
from .graphs import (Graph, connected_components, incidence_apply,
                     incidence_transpose_apply, laplacian_apply, load_graph,
                     save_graph)
from .hierarchy import (Hierarchy, HierarchyLevel, amli_poly, build_hierarchy,
                        sigma_estimate, theta_schedule)
from .krylov import SolveReport, lanczos_extremes, pcg_solve, rates
from .matching import (Partition, aligned_matching, coarse_graph,
                       edge_multiplicity, random_maximal_matching)
from .meshgen import (GridSpec, fichera_graph, grid_graph, lshape_graph,
                      unstructured_2d)
from .precond import (AmliPreconditioner, SmootherConfig, operation_count,
                      two_level_apply, ytay_apply, ytay_solve)
from .solver import AmliSolver
from .stability import (build_pi_general, build_pi_matching, check_commutation,
                        pi_norm_bounds, project_Q, q_energy_norm)

__version__ = "0.1.0"

__all__ = [
    "AmliPreconditioner",
    "AmliSolver",
    "BuildError",
    "Graph",
    "GraphFormatError",
    "GridSpec",
    "Hierarchy",
    "HierarchyLevel",
    "IndefinitePreconditionerError",
    "NotFittedError",
    "Partition",
    "SmootherConfig",
    "SolveReport",
    "aligned_matching",
    "amli_poly",
    "build_hierarchy",
    "build_pi_general",
    "build_pi_matching",
    "check_commutation",
    "coarse_graph",
    "connected_components",
    "edge_multiplicity",
    "fichera_graph",
    "grid_graph",
    "incidence_apply",
    "incidence_transpose_apply",
    "lanczos_extremes",
    "laplacian_apply",
    "load_graph",
    "lshape_graph",
    "operation_count",
    "pcg_solve",
    "pi_norm_bounds",
    "project_Q",
    "q_energy_norm",
    "random_maximal_matching",
    "rates",
    "save_graph",
    "sigma_estimate",
    "theta_schedule",
    "two_level_apply",
    "unstructured_2d",
    "ytay_apply",
    "ytay_solve",
]
