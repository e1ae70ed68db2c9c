"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed or violates the format."""


class BuildError(RuntimeError):
    """Raised when a multilevel hierarchy cannot be constructed."""


class IndefinitePreconditionerError(RuntimeError):
    """Raised when PCG detects a non-positive preconditioner action."""


class NotFittedError(ValueError, AttributeError):
    """Raised when an estimator is used before ``fit``."""
