"""Sparse containers and the solver entry points."""

import numpy as np
import pytest

from dfmbench.sparse import (AsymmetricMatrixError, ReusableFactorization,
                             SingularMatrixError, SolverError, SparseMatrix,
                             solve_dense, solve_spd)


def random_spd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    return m @ m.T + n * np.eye(n)


def test_identity_system():
    b = np.array([3.0, -1.0, 2.5])
    x = solve_spd(np.eye(3), b)
    assert np.allclose(x, b, atol=1e-12)


def test_two_by_two_row_sums():
    a = np.array([[2.0, -1.0], [-1.0, 2.0]])
    x = solve_spd(a, np.array([1.0, 1.0]))
    assert np.allclose(x, [1.0, 1.0], atol=1e-12)


def test_spd_matches_dense_oracle():
    a = random_spd(50, seed=11)
    b = np.random.default_rng(12).normal(size=50)
    x_it = solve_spd(SparseMatrix(a), b)
    x_dn = solve_dense(a, b)
    assert np.max(np.abs(x_it - x_dn)) <= 1e-8


def test_spd_rejects_asymmetric_input():
    a = np.array([[2.0, 1.0], [0.0, 2.0]])
    with pytest.raises(AsymmetricMatrixError):
        solve_spd(a, np.ones(2))


def test_spd_zero_rhs_and_empty_system():
    assert np.array_equal(solve_spd(np.eye(2), np.zeros(2)), np.zeros(2))
    assert solve_spd(SparseMatrix(np.zeros((0, 0))), np.zeros(0)).shape == (0,)


def test_spd_meets_requested_residual():
    a = random_spd(80, seed=3)
    b = np.ones(80)
    x = solve_spd(SparseMatrix(a), b, tol=1e-12)
    resid = np.linalg.norm(b - a @ x) / np.linalg.norm(b)
    assert resid <= 1e-12


def test_dense_scalar_and_permutation():
    assert solve_dense(np.array([[2.0]]), np.array([4.0]))[0] == 2.0
    p = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    b = np.array([1.0, 2.0, 3.0])
    # P x = b => x = P^T b
    assert np.allclose(solve_dense(p, b), p.T @ b, atol=1e-14)


def test_dense_rejects_singular():
    with pytest.raises(SingularMatrixError):
        solve_dense(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_dense_agrees_with_spd():
    a = random_spd(30, seed=5)
    b = np.arange(30, dtype=float)
    assert np.max(np.abs(solve_dense(a, b) - solve_spd(SparseMatrix(a), b))) \
        <= 1e-8


def test_matvec_matches_bruteforce():
    rng = np.random.default_rng(9)
    dense = rng.normal(size=(20, 20))
    dense[dense < 0.3] = 0.0
    m = SparseMatrix(dense)
    x = rng.normal(size=20)
    expect = np.zeros(20)
    for i in range(20):
        for j in range(20):
            expect[i] += dense[i, j] * x[j]
    assert np.allclose(m @ x, expect, atol=1e-12)


def test_from_coo_sums_duplicates_and_drops_zeros():
    rows = np.array([0, 0, 1, 1])
    cols = np.array([0, 0, 1, 1])
    vals = np.array([1.5, 2.5, 1.0, -1.0])
    m = SparseMatrix.from_coo(rows, cols, vals, (2, 2))
    assert m.nnz == 1          # (1,1) cancels exactly and is not stored
    assert m.to_dense()[0, 0] == 4.0


def test_symmetry_check():
    a = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert SparseMatrix(a).is_symmetric()
    a[0, 1] += 1e-9
    assert not SparseMatrix(a).is_symmetric(tol=0.0)
    assert SparseMatrix(a).is_symmetric(tol=1e-8)


def test_reusable_factorization_dense_and_residual_check():
    a = random_spd(25, seed=21)
    factor = ReusableFactorization(SparseMatrix(a))
    b = np.random.default_rng(22).normal(size=25)
    x = factor.solve(b)
    assert np.linalg.norm(b - a @ x) <= 1e-10 * np.linalg.norm(b)


def test_spd_nonpositive_diagonal_fails():
    a = np.diag([1.0, 0.0])
    with pytest.raises(SolverError):
        solve_spd(a, np.ones(2))
