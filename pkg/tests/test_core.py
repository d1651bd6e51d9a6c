"""Objective, gradients, projections and subproblem solvers against
independent oracles."""

import numpy as np
import pytest

from distdict import (ProblemData, d_update_linearized, d_update_plain,
                      grad_codes, grad_dict, objective_global,
                      project_dictionary, sigma_max, soft_threshold,
                      x_update_linearized, x_update_plain)

from oracles import (elastic_net_kkt_residual, finite_difference_gradient,
                     objective_scalar_loop, project_column_line_search,
                     projected_gradient_quadratic, prox_scalar_grid)


def random_problem(rng, M=4, K=3, sizes=(3, 3), lam=0.125, mu=0.0625,
                   alpha=1.0):
    blocks = [rng.uniform(-1, 1, size=(M, n)) for n in sizes]
    return ProblemData(S_blocks=blocks, K=K, lam=lam, mu=mu, alpha=alpha)


# ---------------------------------------------------------------------------
# objective


def test_objective_zero_variables_gives_half_squared_data_norm():
    rng = np.random.default_rng(0)
    problem = random_problem(rng)
    D = np.zeros((problem.M, problem.K))
    X = [np.zeros((problem.K, n)) for n in problem.block_sizes]
    expected = 0.5 * sum(np.sum(S ** 2) for S in problem.S_blocks)
    assert objective_global(D, X, problem) == pytest.approx(expected,
                                                            abs=1e-15)


def test_objective_zero_instance_is_zero():
    problem = ProblemData(S_blocks=[np.zeros((3, 2))], K=2, lam=0.125,
                          mu=0.0625, alpha=1.0)
    D = np.full((3, 2), 0.1)
    assert objective_global(D, [np.zeros((2, 2))], problem) == 0.0


def test_objective_matches_scalar_loop_oracle():
    rng = np.random.default_rng(1)
    problem = random_problem(rng, M=4, K=3, sizes=(4, 2))
    D = rng.uniform(-1, 1, size=(4, 3))
    X = [rng.uniform(-1, 1, size=(3, n)) for n in problem.block_sizes]
    expected = objective_scalar_loop(D, X, problem.S_blocks, problem.lam,
                                     problem.mu)
    assert objective_global(D, X, problem) == pytest.approx(expected,
                                                            abs=1e-12)


def test_objective_rejects_mismatched_dimensions():
    problem = random_problem(np.random.default_rng(2))
    D = np.zeros((problem.M + 1, problem.K))
    X = [np.zeros((problem.K, n)) for n in problem.block_sizes]
    with pytest.raises(ValueError):
        objective_global(D, X, problem)


# ---------------------------------------------------------------------------
# gradients


def test_gradients_vanish_in_the_trivial_cases():
    rng = np.random.default_rng(3)
    D = rng.normal(size=(4, 3))
    S = rng.normal(size=(4, 5))
    X0 = np.zeros((3, 5))
    assert np.array_equal(grad_dict(D, X0, D @ X0), np.zeros((4, 3)))
    X = rng.normal(size=(3, 5))
    assert np.allclose(grad_dict(D, X, D @ X), 0.0, atol=1e-12)
    assert np.array_equal(grad_codes(np.zeros((4, 3)), X, S),
                          np.zeros((3, 5)))
    assert np.allclose(grad_codes(D, X, D @ X), 0.0, atol=1e-12)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(4)
    D = rng.uniform(-1, 1, size=(4, 3))
    X = rng.uniform(-1, 1, size=(3, 5))
    S = rng.uniform(-1, 1, size=(4, 5))

    def fit(D_=None, X_=None):
        Dv = D if D_ is None else D_
        Xv = X if X_ is None else X_
        return 0.5 * np.sum((S - Dv @ Xv) ** 2)

    fd_D = finite_difference_gradient(lambda A: fit(D_=A), D)
    fd_X = finite_difference_gradient(lambda A: fit(X_=A), X)
    gD = grad_dict(D, X, S)
    gX = grad_codes(D, X, S)
    assert np.max(np.abs(gD - fd_D)) / np.max(np.abs(fd_D)) <= 1e-5
    assert np.max(np.abs(gX - fd_X)) / np.max(np.abs(fd_X)) <= 1e-5


# ---------------------------------------------------------------------------
# projection


def test_projection_rescales_the_long_column():
    D = np.array([[3.0], [4.0]])
    out = project_dictionary(D, 1.0)
    assert np.allclose(out, [[0.6], [0.8]], atol=1e-15)


def test_projection_is_identity_on_feasible_dictionaries():
    rng = np.random.default_rng(5)
    D = rng.normal(size=(4, 3))
    D = D / np.linalg.norm(D, axis=0) * 0.9
    assert np.array_equal(project_dictionary(D, 1.0), D)


def test_projection_keeps_zero_columns_and_is_idempotent():
    D = np.array([[0.0, 5.0], [0.0, 0.0]])
    once = project_dictionary(D, 1.0)
    assert np.array_equal(once[:, 0], [0.0, 0.0])
    assert np.array_equal(project_dictionary(once, 1.0), once)


def test_projection_matches_per_column_line_search_oracle():
    rng = np.random.default_rng(6)
    for _ in range(20):
        D = rng.uniform(-3, 3, size=(5, 4))
        got = project_dictionary(D, 1.0)
        want = np.column_stack([project_column_line_search(D[:, k], 1.0)
                                for k in range(D.shape[1])])
        assert np.max(np.abs(got - want)) <= 1e-8


def test_projection_is_nonexpansive():
    rng = np.random.default_rng(7)
    for _ in range(20):
        A = rng.uniform(-3, 3, size=(4, 3))
        B = rng.uniform(-3, 3, size=(4, 3))
        PA, PB = project_dictionary(A, 1.0), project_dictionary(B, 1.0)
        assert (np.linalg.norm(PA - PB, "fro")
                <= np.linalg.norm(A - B, "fro") + 1e-12)


# ---------------------------------------------------------------------------
# soft threshold


def test_soft_threshold_zero_level_is_identity():
    x = np.array([-2.0, -0.3, 0.0, 0.7])
    assert np.array_equal(soft_threshold(x, 0.0), x)


def test_soft_threshold_known_values():
    assert soft_threshold(-0.5, 1.0) == 0.0
    assert soft_threshold(1.2, 0.5) == pytest.approx(0.7, abs=1e-15)
    assert soft_threshold(0.0, 0.5) == 0.0
    assert soft_threshold(-1.2, 0.5) == pytest.approx(-0.7, abs=1e-15)


# ---------------------------------------------------------------------------
# linearized coding update


def test_x_linearized_pure_shrink_when_gradient_and_l1_vanish():
    rng = np.random.default_rng(8)
    K, n = 3, 4
    X = rng.normal(size=(K, n))
    U = np.zeros((2, K))
    S = np.zeros((2, n))
    tau, mu = 2.0, 0.25
    out = x_update_linearized(X, U, S, tau, 0.0, mu)
    assert np.allclose(out, tau / (2 * mu + tau) * X, atol=1e-15)


def test_x_linearized_matches_scalar_grid_oracle():
    rng = np.random.default_rng(9)
    tau, lam, mu = 1.7, 0.125, 0.0625
    for _ in range(25):
        x0 = rng.uniform(-2, 2)
        u = rng.uniform(0.2, 2)
        s = rng.uniform(-2, 2)
        U = np.array([[u]])
        S = np.array([[s]])
        X0 = np.array([[x0]])
        got = x_update_linearized(X0, U, S, tau, lam, mu)[0, 0]
        g = u * (u * x0 - s)
        want = prox_scalar_grid(x0, g, tau, lam, mu)
        assert abs(got - want) <= 1e-6


def test_x_linearized_kills_entries_inside_the_threshold_band():
    tau, lam, mu = 2.0, 0.5, 0.1
    U = np.eye(2)
    X0 = np.array([[0.2, -0.1], [0.05, 0.0]])
    S = np.zeros((2, 2))
    out = x_update_linearized(X0, U, S, tau, lam, mu)
    step = X0 - grad_codes(U, X0, S) / tau
    assert np.all(out[np.abs(step) <= lam / tau] == 0.0)


def test_x_linearized_satisfies_entrywise_optimality():
    rng = np.random.default_rng(10)
    tau, lam, mu = 1.3, 0.125, 0.0625
    U = rng.normal(size=(4, 3))
    S = rng.normal(size=(4, 5))
    X0 = rng.normal(size=(3, 5))
    out = x_update_linearized(X0, U, S, tau, lam, mu)
    G = grad_codes(U, X0, S)
    for idx in np.ndindex(out.shape):
        x = out[idx]
        resid = G[idx] + tau * (x - X0[idx]) + 2 * mu * x
        if x > 0:
            assert abs(resid + lam) <= 1e-10
        elif x < 0:
            assert abs(resid - lam) <= 1e-10
        else:
            assert abs(resid) <= lam + 1e-10


# ---------------------------------------------------------------------------
# plain coding update


def test_x_plain_reduces_to_a_linear_system_without_regularizers():
    rng = np.random.default_rng(11)
    U = rng.normal(size=(5, 3))
    S = rng.normal(size=(5, 4))
    X0 = rng.normal(size=(3, 4))
    tau = 0.8
    out, converged = x_update_plain(X0, U, S, tau, 0.0, 0.0,
                                    inner_tol=1e-10)
    assert converged
    resid = (U.T @ U + tau * np.eye(3)) @ out - (U.T @ S + tau * X0)
    assert np.max(np.abs(resid)) <= 1e-6


def test_x_plain_zero_data_stays_zero():
    U = np.eye(3)
    out, converged = x_update_plain(np.zeros((3, 2)), U, np.zeros((3, 2)),
                                    1.0, 0.125, 0.0625)
    assert converged
    assert np.array_equal(out, np.zeros((3, 2)))


def test_x_plain_satisfies_kkt_conditions_on_a_small_instance():
    rng = np.random.default_rng(12)
    U = rng.normal(size=(2, 2))
    S = rng.normal(size=(2, 2))
    X0 = rng.normal(size=(2, 2))
    tau, lam, mu = 1.0, 0.125, 0.0625
    out, converged = x_update_plain(X0, U, S, tau, lam, mu, inner_tol=1e-12)
    assert converged
    assert elastic_net_kkt_residual(out, U, S, tau, X0, lam, mu) <= 1e-6


def test_x_variants_agree_when_the_prox_weights_are_matched():
    # With an orthogonal-column dictionary (U^T U = s^2 I) the exact
    # subproblem with weight t equals the linearized one with weight
    # t + s^2, for any starting point.
    rng = np.random.default_rng(13)
    Q, _ = np.linalg.qr(rng.normal(size=(6, 4)))
    s = 1.3
    U = s * Q
    S = rng.normal(size=(6, 5))
    X0 = rng.normal(size=(4, 5))
    tau_plain, lam, mu = 0.7, 0.125, 0.0625
    exact, converged = x_update_plain(X0, U, S, tau_plain, lam, mu,
                                      inner_tol=1e-13, inner_max_iter=20000)
    assert converged
    linearized = x_update_linearized(X0, U, S, tau_plain + s ** 2, lam, mu)
    assert np.max(np.abs(exact - linearized)) <= 1e-9


# ---------------------------------------------------------------------------
# dictionary updates


def test_d_linearized_fixed_point_when_gradients_cancel():
    rng = np.random.default_rng(14)
    D = project_dictionary(rng.normal(size=(4, 3)), 1.0)
    out = d_update_linearized(D, np.zeros_like(D), np.zeros_like(D), 2.0,
                              1.0)
    assert np.allclose(out, D, atol=1e-15)


def test_d_linearized_single_column_is_a_projected_gradient_step():
    rng = np.random.default_rng(15)
    D = rng.normal(size=(4, 1))
    G = rng.normal(size=(4, 1))
    tau = 1.7
    out = d_update_linearized(D, G, np.zeros_like(G), tau, 1.0)
    assert np.allclose(out, project_dictionary(D - G / tau, 1.0),
                       atol=1e-15)


def test_d_linearized_matches_projected_gradient_oracle():
    rng = np.random.default_rng(16)
    D = rng.normal(size=(3, 2))
    grad_local = rng.normal(size=(3, 2))
    grad_rest = rng.normal(size=(3, 2))
    tau = 2.2
    got = d_update_linearized(D, grad_local, grad_rest, tau, 1.0)
    want = projected_gradient_quadratic(D, grad_local + grad_rest, tau, 1.0,
                                        iters=200)
    assert np.max(np.abs(got - want)) <= 1e-10


def test_d_plain_is_stationary_on_a_pure_proximal_objective():
    rng = np.random.default_rng(17)
    D = project_dictionary(rng.normal(size=(4, 3)), 1.0)
    X = np.zeros((3, 5))
    S = rng.normal(size=(4, 5))
    out, converged = d_update_plain(D, X, S, np.zeros_like(D), 1.5, 1.0)
    assert converged
    assert np.allclose(out, D, atol=1e-12)


def test_d_plain_solves_the_normal_equations_when_unconstrained():
    rng = np.random.default_rng(18)
    D0 = rng.normal(size=(3, 2)) * 0.1
    X = rng.normal(size=(2, 6))
    S = rng.normal(size=(3, 6))
    grad_rest = rng.normal(size=(3, 2)) * 0.1
    tau = 1.0
    out, converged = d_update_plain(D0, X, S, grad_rest, tau, np.inf,
                                    inner_tol=1e-12,
                                    inner_max_iter=20000)
    assert converged
    resid = (out @ X - S) @ X.T + tau * (out - D0) + grad_rest
    assert np.max(np.abs(resid)) <= 1e-6


def test_d_plain_first_inner_iterate_matches_the_linearized_form():
    rng = np.random.default_rng(19)
    D0 = project_dictionary(rng.normal(size=(4, 3)), 1.0)
    X = rng.normal(size=(3, 6))
    S = rng.normal(size=(4, 6))
    grad_rest = rng.normal(size=(4, 3)) * 0.1
    tau = 0.9
    sigma_sq = sigma_max(X)[0] ** 2
    one_step, _ = d_update_plain(D0, X, S, grad_rest, tau, 1.0,
                                 inner_max_iter=1)
    linearized = d_update_linearized(D0, grad_dict(D0, X, S), grad_rest,
                                     sigma_sq + tau, 1.0)
    assert np.max(np.abs(one_step - linearized)) <= 1e-12


# ---------------------------------------------------------------------------
# largest singular value


def test_sigma_max_known_matrices():
    value, converged = sigma_max(np.eye(4))
    assert converged and value == pytest.approx(1.0, abs=1e-12)
    value, converged = sigma_max(np.diag([3.0, 1.0]))
    assert converged and value == pytest.approx(3.0, rel=1e-10)


def test_sigma_max_matches_dense_svd():
    rng = np.random.default_rng(20)
    A = rng.normal(size=(8, 5))
    want = np.linalg.svd(A, compute_uv=False)[0]
    value, converged = sigma_max(A)
    assert converged
    assert abs(value - want) / want <= 1e-8


# ---------------------------------------------------------------------------
# block-minimization descent


def test_exact_block_minimization_never_increases_the_objective():
    rng = np.random.default_rng(21)
    problem = random_problem(rng, M=5, K=4, sizes=(4, 3), lam=0.125,
                             mu=0.0625)
    D = project_dictionary(rng.normal(size=(5, 4)), 1.0)
    X = [rng.normal(size=(4, n)) * 0.3 for n in problem.block_sizes]
    before = objective_global(D, X, problem)

    S_all = np.hstack(problem.S_blocks)
    X_all = np.hstack(X)
    D_new, _ = d_update_plain(D, X_all, S_all, np.zeros_like(D), 1.0,
                              problem.alpha, inner_tol=1e-11)
    after_d = objective_global(D_new, X, problem)
    assert after_d <= before + 1e-10

    X_new = list(X)
    X_new[0], _ = x_update_plain(X[0], D, problem.S_blocks[0], 1.0,
                                 problem.lam, problem.mu, inner_tol=1e-11)
    after_x = objective_global(D, X_new, problem)
    assert after_x <= before + 1e-10
