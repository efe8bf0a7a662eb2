import numpy as np
import pytest

from linflow import SingularMatrixError
from linflow.errors import NotSymmetricError, RankDeficientError
from linflow.numkit import (
    as_matrix,
    as_vector,
    least_squares,
    matrix_exponential_apply,
    rank,
    solve_linear,
    symmetric_eigen,
)


def test_as_vector_coerces_and_checks():
    v = as_vector([1, 2, 3])
    assert v.dtype == np.float64 and v.shape == (3,)
    with pytest.raises(ValueError):
        as_vector([[1.0, 2.0]])
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([1.0, np.inf])


def test_as_matrix_coerces_and_checks():
    A = as_matrix([[1, 2], [3, 4]])
    assert A.dtype == np.float64 and A.shape == (2, 2)
    with pytest.raises(ValueError):
        as_matrix([1.0, 2.0])
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])


def test_solve_linear_matches_numpy():
    rng = np.random.default_rng(11)
    for n in (1, 2, 5, 9):
        for _ in range(20):
            A = rng.normal(size=(n, n)) + n * np.eye(n)
            b = rng.normal(size=n)
            x = solve_linear(A, b)
            assert np.allclose(x, np.linalg.solve(A, b), atol=1e-10)


def test_solve_linear_rejects_singular():
    A = [[1.0, 2.0], [2.0, 4.0]]
    with pytest.raises(SingularMatrixError):
        solve_linear(A, [1.0, 0.0])
    with pytest.raises(SingularMatrixError):
        solve_linear(np.zeros((3, 3)), np.zeros(3))


def test_solve_linear_needs_pivoting():
    # zero leading pivot: plain elimination without row swaps would fail
    A = [[0.0, 1.0], [1.0, 0.0]]
    assert np.allclose(solve_linear(A, [2.0, 3.0]), [3.0, 2.0])


def test_rank_on_constructed_matrices():
    rng = np.random.default_rng(5)
    for m, n, r in ((4, 3, 2), (5, 5, 1), (3, 6, 3), (6, 2, 2)):
        B = rng.normal(size=(m, r))
        C = rng.normal(size=(r, n))
        assert rank(B @ C) == r
    assert rank(np.zeros((4, 4))) == 0
    assert rank(np.eye(7)) == 7


def test_symmetric_eigen_matches_numpy():
    rng = np.random.default_rng(3)
    for n in (1, 2, 4, 8):
        M = rng.normal(size=(n, n))
        A = (M + M.T) / 2
        vals, vecs = symmetric_eigen(A)
        ref = np.linalg.eigvalsh(A)
        assert np.allclose(np.sort(vals), ref, atol=1e-9)
        # eigen pairs reconstruct the matrix
        assert np.allclose(vecs @ np.diag(vals) @ vecs.T, A, atol=1e-9)
        assert np.allclose(vecs.T @ vecs, np.eye(n), atol=1e-10)


def test_symmetric_eigen_rejects_nonsymmetric():
    with pytest.raises(NotSymmetricError):
        symmetric_eigen([[0.0, 1.0], [0.0, 0.0]])


def test_least_squares_matches_numpy():
    rng = np.random.default_rng(17)
    for m, n in ((6, 3), (4, 4), (10, 2)):
        A = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        x = least_squares(A, b)
        ref = np.linalg.lstsq(A, b, rcond=None)[0]
        assert np.allclose(x, ref, atol=1e-9)


def test_least_squares_rejects_rank_deficient():
    A = [[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]
    with pytest.raises(RankDeficientError):
        least_squares(A, [1.0, 2.0, 3.0])


def test_matrix_exponential_scalar_decay():
    # A = diag(-1), x0 = (1), t = 1 -> e^{-1}
    out = matrix_exponential_apply([[-1.0]], [1.0], 1.0)
    assert np.allclose(out, [np.exp(-1.0)], atol=1e-12)


def test_matrix_exponential_rotation_closed_form():
    w = 0.7
    A = [[0.0, -w], [w, 0.0]]
    for t in (0.1, 1.0, 3.5):
        out = matrix_exponential_apply(A, [1.0, 0.0], t)
        assert np.allclose(out, [np.cos(w * t), np.sin(w * t)], atol=1e-11)


def test_matrix_exponential_nilpotent_exact():
    A = np.zeros((3, 3))
    A[0, 1] = A[1, 2] = 1.0
    x0 = np.array([0.0, 0.0, 2.0])
    t = 1.5
    # series ends at A^2: x(t) = (I + tA + t^2 A^2 / 2) x0
    expected = x0 + t * (A @ x0) + 0.5 * t * t * (A @ A @ x0)
    assert np.allclose(matrix_exponential_apply(A, x0, t), expected, atol=1e-12)


def test_matrix_exponential_semigroup_property():
    rng = np.random.default_rng(23)
    A = rng.normal(size=(5, 5))
    x0 = rng.normal(size=5)
    one = matrix_exponential_apply(A, x0, 1.7)
    half = matrix_exponential_apply(A, matrix_exponential_apply(A, x0, 0.85), 0.85)
    assert np.allclose(one, half, atol=1e-8 * max(1.0, np.linalg.norm(one)))
