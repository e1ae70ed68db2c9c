"""Experiment harness: mesh -> hierarchy -> preconditioned CG -> table row.

Each run solves five (configurable) systems with seeded random solutions and
reports the worst-case measured rate alongside the Lanczos estimate and the
scheduled bound.  Rows serialize to CSV or markdown tables.
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .graphs import laplacian_apply
from .hierarchy import build_hierarchy
from .krylov import pcg_solve, rate_from_condition
from .meshgen import GridSpec, fichera_graph, grid_graph, lshape_graph, unstructured_2d
from .precond import AmliPreconditioner

__all__ = [
    "ExperimentConfig",
    "make_problem",
    "run_experiment",
    "emit_table",
    "TABLE_COLUMNS",
]

FAMILIES = ("square", "lshape", "cube", "fichera", "unstructured2d", "path")
TABLE_COLUMNS = ("n", "levels", "k", "r_k", "r_e", "r_a", "iters", "seed")


@dataclass
class ExperimentConfig:
    """One table row: problem family, size, and solver settings."""

    family: str = "square"
    n: int = 32
    variant: str = "ordinary"
    sigma_mode: str = "auto"
    seed: int = 0
    tol: float = 1e-10
    rhs_count: int = 5
    maxiter: int = 500
    expectations: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        if self.rhs_count < 1:
            raise ValueError("need at least one right-hand side")

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def to_dict(self):
        return asdict(self)


def make_problem(family, n, seed=0):
    """Graph plus lattice coordinates (None for unstructured) and strategy."""
    if family == "square":
        g, coords = grid_graph(GridSpec((n, n)))
        return g, coords, "structured"
    if family == "path":
        g, coords = grid_graph(GridSpec((n,)))
        return g, coords, "structured"
    if family == "cube":
        g, coords = grid_graph(GridSpec((n, n, n)))
        return g, coords, "structured"
    if family == "lshape":
        g, coords = lshape_graph(n)
        return g, coords, "structured"
    if family == "fichera":
        g, coords = fichera_graph(n)
        return g, coords, "structured"
    if family == "unstructured2d":
        return unstructured_2d(n, seed), None, "random"
    raise ValueError(f"unknown family {family!r}")


def run_experiment(cfg):
    """Build the pipeline for one configuration and report the worst of
    ``rhs_count`` seeded solves as a table row."""
    g, coords, strategy = make_problem(cfg.family, cfg.n, cfg.seed)
    hierarchy = build_hierarchy(g, strategy, variant=cfg.variant, seed=cfg.seed,
                                coords=coords, sigma_mode=cfg.sigma_mode)
    pre = AmliPreconditioner(hierarchy)
    apply_A = lambda u: laplacian_apply(g, u)

    rng = np.random.default_rng(cfg.seed)
    worst_ra = 0.0
    worst_re = 0.0
    worst_iters = 0
    all_converged = True
    for _ in range(cfg.rhs_count):
        x_true = rng.standard_normal(g.n)
        x_true -= x_true.mean()
        f = apply_A(x_true)
        _, report = pcg_solve(apply_A, pre.apply, f, tol=cfg.tol,
                              x_true=x_true, maxiter=cfg.maxiter)
        all_converged &= report.converged
        worst_iters = max(worst_iters, report.iterations)
        if report.r_a is not None:
            worst_ra = max(worst_ra, report.r_a)
        if report.r_e is not None:
            worst_re = max(worst_re, report.r_e)

    zeta = hierarchy.zeta_finest
    row = {
        "n": cfg.n,
        "levels": hierarchy.num_levels,
        "k": round(zeta, 4),
        "r_k": round(rate_from_condition(zeta), 4),
        "r_e": round(worst_re, 4),
        "r_a": round(worst_ra, 4),
        "iters": worst_iters,
        "seed": cfg.seed,
        "converged": bool(all_converged),
    }
    if cfg.expectations:
        row["within_expectations"] = check_expectations(row, cfg.expectations)
    return row


def check_expectations(row, expectations):
    """True iff every expected quantity falls inside its [lo, hi] band."""
    for key, band in expectations.items():
        lo, hi = float(band[0]), float(band[1])
        value = row.get(key)
        if value is None or not (lo <= float(value) <= hi):
            return False
    return True


def emit_table(rows, fmt="csv", path=None):
    """Serialize result rows to CSV or a markdown table.

    Returns the text; also writes it to ``path`` when given.
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(",".join(TABLE_COLUMNS) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(row.get(c)) for c in TABLE_COLUMNS) + "\n")
    else:
        buf.write("| " + " | ".join(TABLE_COLUMNS) + " |\n")
        buf.write("|" + "|".join(["---"] * len(TABLE_COLUMNS)) + "|\n")
        for row in rows:
            buf.write("| " + " | ".join(_fmt(row.get(c)) for c in TABLE_COLUMNS) + " |\n")
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as f:
            f.write(text)
    return text


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return json.dumps(value)
    return str(value)


def parse_table(text):
    """Read back a CSV produced by emit_table."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        row = {}
        for key, tok in zip(header, ln.split(",")):
            if tok == "":
                row[key] = None
            else:
                try:
                    row[key] = json.loads(tok)
                except json.JSONDecodeError:
                    row[key] = tok
        rows.append(row)
    return rows
