"""Acceptance suite: one test per release criterion, each printing a verdict.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the PASS lines.
"""

import time
import warnings

import numpy as np
import pytest

from matchamli import (AmliPreconditioner, SmootherConfig, aligned_matching,
                       build_hierarchy, build_pi_general, build_pi_matching,
                       check_commutation, edge_multiplicity, grid_graph,
                       laplacian_apply, pi_norm_bounds, q_energy_norm,
                       random_maximal_matching, theta_schedule)
from matchamli.experiments import ExperimentConfig, run_experiment
from matchamli.hierarchy import build_transfer_maps
from matchamli.meshgen import GridSpec
from matchamli.oracle import (dense_laplacian, pinv_sym, rayleigh_extremes)
from matchamli.precond import operation_count

from helpers import (dense_incidence, dense_operator, preconditioned_spectrum,
                     random_connected_graph)


def _verdict(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    print(line)
    assert ok, line


def _instance_family():
    """50 seeded random connected graphs with random maximal matchings, plus
    the aligned 2d/3d grid cases; shared by criteria 1 and 2."""
    instances = []
    for s in range(50):
        rng = np.random.default_rng(1000 + s)
        n = int(rng.integers(6, 41))
        g = random_connected_graph(1000 + s, n)
        instances.append((g, random_maximal_matching(g, s)))
    for dims, axis in (((4, 4), 0), ((4, 4, 4), 0)):
        g, coords = grid_graph(GridSpec(dims))
        instances.append((g, aligned_matching(g, coords, axis)))
    return instances


class TestAcceptance:
    def test_criterion_1_commutation_suite(self):
        start = time.monotonic()
        worst = 0.0
        for g, p in _instance_family():
            for builder in (build_pi_matching, build_pi_general):
                Pi = builder(g, p)
                worst = max(worst, check_commutation(g, p, Pi, trials=10, seed=3))
        elapsed = time.monotonic() - start
        ok = worst <= 1e-12 and elapsed < 10.0
        _verdict(1, ok, f"max commutation residual {worst:.2e} over 52 "
                        f"instances x 2 constructions in {elapsed:.1f}s")

    def test_criterion_2_norm_bound_suite(self):
        worst_q_slack = np.inf
        for g, p in _instance_family():
            Pi = build_pi_matching(g, p)
            d = g.max_degree
            b = pi_norm_bounds(Pi, d)
            v2a = p.vertex_to_aggregate
            has_external = any(v2a[i] != v2a[j] for i, j in g.edges)
            if has_external:
                assert b["inf_norm"] == 2.0, f"inf norm {b['inf_norm']} on n={g.n}"
            assert b["one_norm"] <= max(1.0, d - 1.0) + 1e-12
            rho = float(np.linalg.eigvalsh((Pi @ Pi.T).toarray()).max())
            assert rho <= d + 1e-10
            assert b["gershgorin_bound"] <= d + 1e-10
            q2 = q_energy_norm(g, p)
            assert q2 <= rho + 1e-10
            worst_q_slack = min(worst_q_slack, rho - q2)
        _verdict(2, True, "norm bounds hold on all instances "
                          f"(min rho - |Q|^2 gap {worst_q_slack:.3f})")

    def test_criterion_3_grid_stability(self):
        worst = 0.0
        cases = []
        for dims in [(8, 8), (4, 4, 4)]:
            g, coords = grid_graph(GridSpec(dims))
            cases.append((dims, g, aligned_matching(g, coords, 0)))
        for n in (4, 8, 16, 32, 64):
            g, coords = grid_graph(GridSpec((n,)))
            cases.append(((n,), g, aligned_matching(g, coords, 0)))
        for dims, g, p in cases:
            q2 = q_energy_norm(g, p)
            assert q2 <= 2.0 + 1e-10, f"|Q|^2 = {q2} on {dims}"
            worst = max(worst, q2)
        _verdict(3, True, f"aligned |Q|^2_A <= 2 on grids and paths "
                          f"(max observed {worst:.6f})")

    def test_criterion_4_schur_oracle(self):
        rng = np.random.default_rng(77)
        worst = 0.0
        from matchamli.oracle import schur_dense

        for t in range(20):
            n = int(rng.integers(4, 13))
            g = random_connected_graph(4000 + t, n)
            p = random_maximal_matching(g, t)
            P, Y = build_transfer_maps(g, p)
            A = dense_laplacian(g)
            S = schur_dense(A, Y.toarray(), P.toarray())
            B = dense_incidence(g)
            BY = B @ Y.toarray()
            BP = B @ P.toarray()
            for _ in range(3):
                x = rng.standard_normal(P.shape[1])
                w, *_ = np.linalg.lstsq(BY, -BP @ x, rcond=None)
                direct = float(np.sum((BY @ w + BP @ x) ** 2))
                worst = max(worst, abs(direct - x @ S @ x))
        ok = worst <= 1e-8
        _verdict(4, ok, f"eliminated block matches energy minimization "
                        f"(max deviation {worst:.2e} over 20 instances)")

    def test_criterion_5_two_level_spectrum(self):
        details = []
        for dims in [(8,), (16,), (32,), (4, 4), (4, 8)]:
            g, coords = grid_graph(GridSpec(dims))
            p = aligned_matching(g, coords, 0)
            P, Y = build_transfer_maps(g, p)
            Pd, Yd = P.toarray(), Y.toarray()
            A = dense_laplacian(g)
            K = Yd.T @ A @ Yd
            from matchamli import coarse_graph

            gc, mult = edge_multiplicity(g, p)
            Ac = dense_laplacian(gc)
            q2 = q_energy_norm(g, p)
            npair, na = Yd.shape[1], Pd.shape[1]
            one_hat = np.concatenate([np.zeros(npair), np.ones(na)])
            H = np.hstack([Yd, Pd])
            Ahat = H.T @ A @ H

            # exact solves: window [1, sigma |Q|^2]
            sigma = 2.0
            L = np.eye(npair + na)
            L[npair:, :npair] = Pd.T @ A @ Yd @ np.linalg.inv(K)
            Ghat = L @ _block_diag(K, sigma * Ac) @ L.T
            lo, hi = rayleigh_extremes(Ghat, Ahat, one_hat)
            assert lo >= 1.0 - 1e-8, f"{dims}: lower edge {lo}"
            assert hi <= sigma * q2 + 1e-8, f"{dims}: upper edge {hi}"

            # single weighted-sweep smoother with ratio scaling: window from
            # the measured smoother and coarse equivalence constants
            sigma_r = float(mult.max())
            omega = 1.0 / np.abs(K).sum(axis=1).max()
            M = np.eye(npair) / omega
            Mbar = M @ np.linalg.inv(M + M.T - K) @ M.T
            wK, VK = np.linalg.eigh(K)
            Kinv_half = (VK / np.sqrt(wK)) @ VK.T
            kappa_s = float(np.linalg.eigvalsh(Kinv_half @ Mbar @ Kinv_half).max())
            eta = 1.0
            Lt = np.eye(npair + na)
            Lt[npair:, :npair] = Pd.T @ A @ Yd @ np.linalg.inv(M)
            Bhat = Lt @ _block_diag(Mbar, sigma_r * Ac) @ Lt.T
            lo_b, hi_b = rayleigh_extremes(Bhat, Ahat, one_hat)
            bound = (kappa_s + sigma_r * eta - 1.0) * q2
            assert lo_b >= 1.0 - 1e-8, f"{dims}: inexact lower edge {lo_b}"
            assert hi_b <= bound + 1e-8, f"{dims}: {hi_b} vs bound {bound}"
            details.append(f"{dims}:[{lo:.3f},{hi:.3f}]<=[{sigma * q2:.3f}]")
        _verdict(5, True, "two-level windows hold, exact and smoothed "
                          "(" + " ".join(details[:3]) + " ...)")

    def test_criterion_6_theta_schedule(self):
        th = theta_schedule(4.0, 200)
        k = np.arange(1, 201)
        ok_bound = bool(np.all(th >= 1.0 / (2 * k + np.log(k) + 1.0)))
        ok_monotone = bool(np.all(np.diff(th) <= 1e-15))
        ok_fixed = True
        for c in (1.0, 2.25):
            ths = theta_schedule(c, 60)
            ok_fixed &= bool(np.all(ths >= 2.0 / np.sqrt(c) - 1.0 - 1e-14))
        ok = ok_bound and ok_monotone and ok_fixed
        _verdict(6, ok, f"theta_200 = {th[-1]:.6f} >= {1.0 / (400 + np.log(200) + 1):.6f}, "
                        "monotone, fixed-point bounds hold")

    def test_criterion_7_multilevel_spectrum(self):
        details = []
        cases = [((16,),), ((32,),), ((64,),), ((8, 8),)]
        for (dims,) in cases:
            g, coords = grid_graph(GridSpec(dims))
            h = build_hierarchy(g, "structured", coords=coords)
            pre = AmliPreconditioner(h)
            eigs = preconditioned_spectrum(g, pre.apply)
            assert eigs.min() >= h.theta_finest - 1e-6, \
                f"{dims}: {eigs.min()} < {h.theta_finest}"
            assert eigs.max() <= 1.0 + 1e-6, f"{dims}: {eigs.max()}"
            details.append(f"{dims}:[{eigs.min():.4f},{eigs.max():.6f}]"
                           f">=theta_J={h.theta_finest:.4f}")
        _verdict(7, True, "preconditioned spectra inside [theta_J, 1]: "
                          + " ".join(details))

    def test_criterion_8_ordinary_tables(self):
        start = time.monotonic()
        square = run_experiment(ExperimentConfig(family="square", n=128,
                                                 variant="ordinary", seed=0))
        square_time = time.monotonic() - start
        cube = run_experiment(ExperimentConfig(family="cube", n=16,
                                               variant="ordinary", seed=0))
        lshape = run_experiment(ExperimentConfig(family="lshape", n=128,
                                                 variant="ordinary", seed=0))
        ok = (0.49 <= square["r_a"] <= 0.59 and 0.51 <= square["r_e"] <= 0.61
              and square_time < 60.0
              and 0.50 <= cube["r_a"] <= 0.60
              and 0.51 <= lshape["r_a"] <= 0.61
              and square["converged"] and cube["converged"] and lshape["converged"])
        _verdict(8, ok, f"square128 r_a={square['r_a']} r_e={square['r_e']} "
                        f"({square_time:.0f}s), cube16 r_a={cube['r_a']}, "
                        f"lshape128 r_a={lshape['r_a']}")

    def test_criterion_9_modified_tables(self):
        square = run_experiment(ExperimentConfig(family="square", n=128,
                                                 variant="modified", seed=0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            tri = run_experiment(ExperimentConfig(family="unstructured2d", n=128,
                                                  variant="modified", seed=0))
        ok = (0.49 <= square["r_a"] <= 0.59 and tri["r_a"] <= 0.80
              and square["converged"] and tri["converged"])
        _verdict(9, ok, f"square128 modified r_a={square['r_a']}, "
                        f"unstructured128 modified r_a={tri['r_a']}")

    def test_criterion_10_cycle_complexity(self):
        xs, ys = [], []
        for e in range(8, 15):
            n = 2 ** e
            g, coords = grid_graph(GridSpec((n,)))
            pre = AmliPreconditioner(build_hierarchy(g, "structured",
                                                     coords=coords))
            xs.append(n * e)
            ys.append(operation_count(pre))
        x = np.asarray(xs, float)
        y = np.asarray(ys, float)
        slope = float(x @ y / (x @ x))
        r2 = 1.0 - float(((y - slope * x) ** 2).sum() / ((y - y.mean()) ** 2).sum())
        deviation = float(np.abs(y / (slope * x) - 1.0).max())
        ok = r2 >= 0.98
        _verdict(10, ok, f"flops fit {slope:.1f} * n log2 n with R^2={r2:.4f} "
                         f"(max pointwise deviation {deviation:.1%})")


def _block_diag(K, D):
    npair = K.shape[0]
    na = D.shape[0]
    out = np.zeros((npair + na, npair + na))
    out[:npair, :npair] = K
    out[npair:, npair:] = D
    return out
