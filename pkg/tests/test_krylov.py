import numpy as np
import pytest

from matchamli import (AmliPreconditioner, GridSpec, IndefinitePreconditionerError,
                       build_hierarchy, grid_graph, lanczos_extremes,
                       laplacian_apply, pcg_solve, rates)
from matchamli.krylov import rate_from_condition
from matchamli.oracle import dense_laplacian, orthonormal_complement, pinv_sym

from helpers import preconditioned_spectrum, random_connected_graph


def laplacian_system(seed, n):
    g = random_connected_graph(seed, n)
    rng = np.random.default_rng(seed)
    x_true = rng.standard_normal(n)
    x_true -= x_true.mean()
    apply_A = lambda u: laplacian_apply(g, u)
    return g, apply_A, x_true, apply_A(x_true)


class TestPcg:
    def test_identity_preconditioner_finite_termination(self):
        g, apply_A, x_true, f = laplacian_system(1, 12)
        x, report = pcg_solve(apply_A, lambda r: r, f, tol=1e-12, x_true=x_true)
        assert report.converged
        assert report.iterations <= g.n
        assert np.abs(x - x_true).max() < 1e-9

    def test_exact_inverse_one_iteration(self):
        g, apply_A, x_true, f = laplacian_system(2, 10)
        Adag = pinv_sym(dense_laplacian(g))
        x, report = pcg_solve(apply_A, lambda r: Adag @ r, f, tol=1e-10,
                              x_true=x_true)
        assert report.iterations == 1
        assert report.converged

    def test_error_history_monotone_and_mean_free(self):
        g, apply_A, x_true, f = laplacian_system(3, 40)
        x, report = pcg_solve(apply_A, lambda r: r, f, tol=1e-10, x_true=x_true)
        hist = np.asarray(report.error_A_norm_history)
        assert np.all(np.diff(hist) <= 1e-12 * hist[0])
        assert abs(x.mean()) <= 1e-10

    def test_residual_stopping_without_truth(self):
        g, apply_A, x_true, f = laplacian_system(4, 30)
        x, report = pcg_solve(apply_A, lambda r: r, f, tol=1e-8)
        assert report.converged
        assert report.error_A_norm_history is None
        assert report.residual_history[-1] <= 1e-8 * report.residual_history[0]

    def test_amli_rate_below_schedule_bound(self):
        g, coords = grid_graph(GridSpec((1024,)))
        h = build_hierarchy(g, "structured", coords=coords)
        pre = AmliPreconditioner(h)
        rng = np.random.default_rng(5)
        x_true = rng.standard_normal(g.n)
        x_true -= x_true.mean()
        f = laplacian_apply(g, x_true)
        _, report = pcg_solve(lambda u: laplacian_apply(g, u), pre.apply, f,
                              tol=1e-10, x_true=x_true)
        assert report.converged
        r_k = rate_from_condition(h.zeta_finest)
        slack = 2.0 ** (1.0 / report.iterations)
        assert report.r_a <= r_k * slack

    def test_indefinite_preconditioner_detected(self):
        _, apply_A, x_true, f = laplacian_system(6, 10)
        with pytest.raises(IndefinitePreconditionerError):
            pcg_solve(apply_A, lambda r: -r, f, tol=1e-10)

    def test_iteration_cap(self):
        g, apply_A, x_true, f = laplacian_system(7, 60)
        _, report = pcg_solve(apply_A, lambda r: r, f, tol=1e-14, x_true=x_true,
                              maxiter=3)
        assert not report.converged
        assert report.iterations == 3


class TestLanczos:
    def test_exact_preconditioner_collapses_spectrum(self):
        g, apply_A, _, _ = laplacian_system(8, 14)
        Adag = pinv_sym(dense_laplacian(g))
        lo, hi = lanczos_extremes(apply_A, lambda r: Adag @ r, g.n, iters=10,
                                  seed=0)
        assert lo == pytest.approx(1.0, abs=1e-10)
        assert hi == pytest.approx(1.0, abs=1e-10)

    def test_known_spectrum_recovered(self):
        # operator with eigenvalues 1..10 on the mean-free subspace
        n = 11
        W = orthonormal_complement(np.ones(n))
        vals = np.arange(1.0, 11.0)
        M = W @ np.diag(vals) @ W.T
        lo, hi = lanczos_extremes(lambda u: M @ u, lambda r: r, n, iters=20,
                                  seed=1)
        assert lo == pytest.approx(1.0, abs=1e-6)
        assert hi == pytest.approx(10.0, abs=1e-6)

    def test_never_exceeds_dense_extremes(self):
        g, coords = grid_graph(GridSpec((100,)))
        h = build_hierarchy(g, "structured", coords=coords)
        pre = AmliPreconditioner(h)
        eigs = preconditioned_spectrum(g, pre.apply)
        lo, hi = lanczos_extremes(lambda u: laplacian_apply(g, u), pre.apply,
                                  g.n, iters=60, seed=2)
        assert hi <= eigs.max() + 1e-6
        assert lo >= eigs.min() - 1e-6

    def test_amli_upper_edge_at_one(self):
        g, coords = grid_graph(GridSpec((64,)))
        h = build_hierarchy(g, "structured", coords=coords)
        pre = AmliPreconditioner(h)
        _, hi = lanczos_extremes(lambda u: laplacian_apply(g, u), pre.apply,
                                 g.n, iters=60, seed=3)
        assert hi <= 1.0 + 1e-8

    def test_minimum_iterations(self):
        with pytest.raises(ValueError):
            lanczos_extremes(lambda u: u, lambda r: r, 5, iters=1)


class TestRates:
    def test_table_condition_value(self):
        assert rate_from_condition(13.9) == pytest.approx(0.577, abs=5e-4)

    def test_unit_condition(self):
        assert rate_from_condition(1.0) == 0.0

    def test_average_rate_arithmetic(self):
        from matchamli.krylov import SolveReport

        report = SolveReport(iterations=30, converged=True,
                             residual_history=[1.0],
                             error_A_norm_history=[1.0, 1e-10],
                             r_a=(1e-10) ** (1.0 / 30.0))
        out = rates(report, 13.9)
        assert out["r_k"] == pytest.approx(0.577, abs=5e-4)
        assert report.r_a == pytest.approx(0.46416, abs=1e-4)
        assert report.zeta == 13.9

    def test_missing_history_flagged(self):
        from matchamli.krylov import SolveReport

        report = SolveReport(iterations=0, converged=False,
                             residual_history=[1.0])
        out = rates(report, 4.0)
        assert out["r_a_available"] is False
