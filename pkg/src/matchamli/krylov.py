"""Nullspace-aware preconditioned conjugate gradients and rate bookkeeping.

The Laplacian kernel (constants) is handled by projecting the right-hand
side, the initial guess, and every preconditioned residual onto the
complement of the constant vector.  The PCG coefficients double as a Lanczos
tridiagonal, giving extreme-eigenvalue estimates of the preconditioned
operator and the derived convergence rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndefinitePreconditionerError

__all__ = [
    "SolveReport",
    "pcg_solve",
    "lanczos_extremes",
    "rates",
]


def _project(v):
    return v - v.mean()


def _tridiagonal(alphas, betas):
    """Lanczos tridiagonal matrix from PCG step and direction coefficients."""
    m = len(alphas)
    T = np.zeros((m, m))
    for j in range(m):
        T[j, j] = 1.0 / alphas[j]
        if j > 0:
            T[j, j] += betas[j - 1] / alphas[j - 1]
            off = np.sqrt(betas[j - 1]) / alphas[j - 1]
            T[j, j - 1] = off
            T[j - 1, j] = off
    return T


@dataclass
class SolveReport:
    """Iteration history and derived convergence rates of one PCG run."""

    iterations: int
    converged: bool
    residual_history: list = field(repr=False)
    error_A_norm_history: list = field(repr=False, default=None)
    r_a: float = None
    lanczos_extremes: tuple = None
    r_e: float = None
    r_k: float = None
    zeta: float = None


def pcg_solve(apply_A, apply_B, f, tol=1e-10, x_true=None, maxiter=500,
              lanczos_cap=60):
    """Preconditioned CG for a singular system with constant nullspace.

    Parameters
    ----------
    apply_A, apply_B : callables
        The operator and the preconditioner action, both SPD on the
        complement of the constant vector.
    f : ndarray
        Right-hand side; its mean is projected out.
    tol : float
        With ``x_true`` given, stop at this reduction of the relative
        A-norm of the error; otherwise of the preconditioned residual norm.
    x_true : ndarray, optional
        Known solution enabling exact error tracking.

    Returns
    -------
    (x, SolveReport)
    """
    f = _project(np.asarray(f, dtype=np.float64))
    n = f.shape[0]
    x = np.zeros(n)
    r = f.copy()
    err_hist = None
    if x_true is not None:
        x_true = _project(np.asarray(x_true, dtype=np.float64))
        e = x - x_true
        err0 = float(np.sqrt(max(e @ apply_A(e), 0.0)))
        err_hist = [err0]

    z = _project(apply_B(r))
    rho = float(r @ z)
    _check_definite(rho, r, z)
    res0 = float(np.sqrt(max(rho, 0.0)))
    res_hist = [res0]
    p = z.copy()
    alphas = []
    betas = []
    converged = res0 == 0.0
    it = 0
    while not converged and it < maxiter:
        Ap = apply_A(p)
        pAp = float(p @ Ap)
        if pAp <= 0.0:
            raise IndefinitePreconditionerError(
                f"search direction with non-positive curvature at iteration {it}")
        alpha = rho / pAp
        x += alpha * p
        r -= alpha * Ap
        alphas.append(alpha)
        it += 1
        if err_hist is not None:
            e = x - x_true
            err_hist.append(float(np.sqrt(max(e @ apply_A(e), 0.0))))
            if err_hist[-1] <= tol * err_hist[0]:
                converged = True
        z = _project(apply_B(r))
        rho_new = float(r @ z)
        _check_definite(rho_new, r, z)
        res_hist.append(float(np.sqrt(max(rho_new, 0.0))))
        if err_hist is None and res_hist[-1] <= tol * res_hist[0]:
            converged = True
        if not converged:
            betas.append(rho_new / rho)
        rho = rho_new
        if not converged:
            p = z + betas[-1] * p

    extremes = None
    if alphas:
        m = min(len(alphas), lanczos_cap)
        T = _tridiagonal(alphas[:m], betas[:m - 1])
        ev = np.linalg.eigvalsh(T)
        extremes = (float(ev[0]), float(ev[-1]))

    r_a = None
    if err_hist is not None and it > 0 and err_hist[0] > 0:
        r_a = float((err_hist[-1] / err_hist[0]) ** (1.0 / it))
    report = SolveReport(iterations=it, converged=converged,
                         residual_history=res_hist,
                         error_A_norm_history=err_hist,
                         r_a=r_a, lanczos_extremes=extremes)
    if extremes is not None and extremes[0] > 0:
        report.r_e = rate_from_condition(extremes[1] / extremes[0])
    return x, report


def _check_definite(rho, r, z):
    if rho < -1e-13 * (np.linalg.norm(r) * np.linalg.norm(z) + 1.0):
        raise IndefinitePreconditionerError(
            f"preconditioned inner product is negative ({rho:.3e})")


def lanczos_extremes(apply_A, apply_B, n, iters=60, seed=0):
    """Extreme eigenvalue estimates of B^{-1} A on the constant complement.

    Runs the preconditioned iteration on a seeded random right-hand side for
    at most ``iters`` steps and reads the extremes off the tridiagonal.
    """
    if iters < 2:
        raise ValueError("need at least two iterations")
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(n)
    _, report = pcg_solve(apply_A, apply_B, f, tol=1e-14, maxiter=iters,
                          lanczos_cap=iters)
    if report.lanczos_extremes is None:
        raise RuntimeError("iteration produced no spectral information")
    return report.lanczos_extremes


def rate_from_condition(kappa):
    """Asymptotic CG rate (sqrt(kappa) - 1)/(sqrt(kappa) + 1)."""
    if kappa < 1.0:
        kappa = 1.0
    s = np.sqrt(kappa)
    return float((s - 1.0) / (s + 1.0))


def rates(report, zeta):
    """Fill in the derived rates of a report.

    ``r_a`` is the measured average error reduction, ``r_e`` comes from the
    Lanczos condition estimate, and ``r_k`` from the scheduled condition
    bound ``zeta`` of the finest level.
    """
    out = {"r_a": report.r_a, "r_e": report.r_e, "r_k": rate_from_condition(zeta)}
    report.r_k = out["r_k"]
    report.zeta = float(zeta)
    if report.r_a is None:
        out["r_a_available"] = False
    return out
