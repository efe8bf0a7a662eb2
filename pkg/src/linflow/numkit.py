"""Dense linear-algebra kernels shared across the package.

Everything operates on plain float64 numpy arrays. The routines are
deliberately self-contained (Gaussian elimination, pivoted row reduction,
Jacobi rotations, scaling-and-squaring) so results elsewhere in the
package can be cross-checked against a stack with no shared code path.
Sizes stay small (tens of rows), so clarity wins over asymptotics.
"""

from __future__ import annotations

import numpy as np

from .errors import NotSymmetricError, RankDeficientError, SingularMatrixError

__all__ = [
    "as_vector",
    "as_matrix",
    "solve_linear",
    "rank",
    "symmetric_eigen",
    "least_squares",
    "matrix_exponential_apply",
]


def as_vector(x, name="vector"):
    """Coerce ``x`` to a finite 1-d float64 array.

    Parameters
    ----------
    x : array_like
    name : str
        Label used in error messages.

    Returns
    -------
    numpy.ndarray
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if v.size and not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite entries")
    return v


def as_matrix(x, name="matrix"):
    """Coerce ``x`` to a finite 2-d float64 array."""
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    if a.size and not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return a


def solve_linear(A, b):
    """Solve the square system A x = b.

    Gaussian elimination with partial pivoting. Intended for
    well-conditioned desk-scale systems; raises rather than returning a
    garbage solution when a pivot collapses.

    Parameters
    ----------
    A : (n, n) array_like
    b : (n,) array_like

    Returns
    -------
    x : (n,) numpy.ndarray

    Raises
    ------
    SingularMatrixError
        If a pivot magnitude falls below 1e-12 relative to the largest
        entry of ``A``.
    """
    U = as_matrix(A, "A").copy()
    y = as_vector(b, "b").copy()
    n, ncols = U.shape
    if n != ncols:
        raise ValueError(f"A must be square, got shape {U.shape}")
    if y.shape[0] != n:
        raise ValueError(f"b has length {y.shape[0]}, expected {n}")
    if n == 0:
        raise ValueError("empty system")

    scale = np.max(np.abs(U))
    if scale == 0.0:
        raise SingularMatrixError("coefficient matrix is zero")

    for k in range(n):
        p = k + int(np.argmax(np.abs(U[k:, k])))
        if abs(U[p, k]) < 1e-12 * scale:
            raise SingularMatrixError(
                f"pivot {U[p, k]:.3e} in column {k} below 1e-12 of matrix scale {scale:.3e}"
            )
        if p != k:
            U[[k, p]] = U[[p, k]]
            y[[k, p]] = y[[p, k]]
        factors = U[k + 1 :, k] / U[k, k]
        U[k + 1 :, k:] -= np.outer(factors, U[k, k:])
        y[k + 1 :] -= factors * y[k]

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (y[k] - U[k, k + 1 :] @ x[k + 1 :]) / U[k, k]
    return x


def rank(A, tol=1e-9):
    """Numerical rank of ``A`` by row reduction with full pivoting.

    At every elimination step the largest remaining entry is chosen as
    pivot; elimination stops once the pivot drops below ``tol`` times the
    first (largest) pivot, which bounds the largest singular value from
    below. Stable under row swaps and moderate row scaling.

    Parameters
    ----------
    A : (r, c) array_like
    tol : float
        Relative cutoff, > 0.

    Returns
    -------
    int
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    B = as_matrix(A, "A").copy()
    nr, nc = B.shape
    k = 0
    first_pivot = 0.0
    while k < min(nr, nc):
        sub = np.abs(B[k:, k:])
        pi, pj = np.unravel_index(int(np.argmax(sub)), sub.shape)
        piv = sub[pi, pj]
        if k == 0:
            first_pivot = piv
        if piv == 0.0 or piv < tol * first_pivot:
            break
        pi += k
        pj += k
        if pi != k:
            B[[k, pi]] = B[[pi, k]]
        if pj != k:
            B[:, [k, pj]] = B[:, [pj, k]]
        B[k + 1 :, k:] -= np.outer(B[k + 1 :, k] / B[k, k], B[k, k:])
        k += 1
    return k


def symmetric_eigen(A):
    """Eigenvalues and eigenvectors of a symmetric matrix.

    Cyclic Jacobi rotation sweeps; robust and simple at the sizes used
    here.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric within 1e-10 relative to its magnitude.

    Returns
    -------
    w : (n,) numpy.ndarray
        Eigenvalues in ascending order.
    V : (n, n) numpy.ndarray
        Orthonormal eigenvectors as columns, ``A @ V[:, k] = w[k] * V[:, k]``.

    Raises
    ------
    NotSymmetricError
    """
    A = as_matrix(A, "A")
    n, ncols = A.shape
    if n != ncols:
        raise ValueError(f"A must be square, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    if A.size and np.max(np.abs(A - A.T)) > 1e-10 * scale:
        raise NotSymmetricError(
            f"asymmetry {np.max(np.abs(A - A.T)):.3e} exceeds 1e-10 of scale {scale:.3e}"
        )

    B = (A + A.T) / 2.0
    V = np.eye(n)
    for _ in range(60):
        off = np.sqrt(2.0 * np.sum(np.triu(B, 1) ** 2))
        if off <= 1e-13 * scale * max(n, 1):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = B[p, q]
                if abs(apq) <= 1e-15 * scale:
                    continue
                tau = (B[q, q] - B[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                bp, bq = B[:, p].copy(), B[:, q].copy()
                B[:, p] = c * bp - s * bq
                B[:, q] = s * bp + c * bq
                bp, bq = B[p, :].copy(), B[q, :].copy()
                B[p, :] = c * bp - s * bq
                B[q, :] = s * bp + c * bq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    w = np.diag(B).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def least_squares(A, b, tol=1e-9):
    """Minimizer of ||A x - b|| for a full-column-rank matrix.

    Solves the normal equations A'A x = A'b, which is accurate enough at
    the condition numbers encountered here.

    Parameters
    ----------
    A : (r, c) array_like with rank c
    b : (r,) array_like
    tol : float
        Rank-detection cutoff forwarded to :func:`rank`.

    Returns
    -------
    x : (c,) numpy.ndarray

    Raises
    ------
    RankDeficientError
        If the numerical rank of ``A`` is below its column count.
    """
    A = as_matrix(A, "A")
    b = as_vector(b, "b")
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
    r = rank(A, tol)
    if r < A.shape[1]:
        raise RankDeficientError(f"rank {r} below column count {A.shape[1]}")
    return solve_linear(A.T @ A, A.T @ b)


def matrix_exponential_apply(A, x0, t):
    """Evaluate ``expm(A * t) @ x0``.

    Scaling-and-squaring with a Taylor series carried to machine-level
    truncation; accurate to about 1e-10 relative at the matrix norms used
    in this package. Serves as the integrator-independent reference for
    time-invariant runs.

    Parameters
    ----------
    A : (n, n) array_like
    x0 : (n,) array_like
    t : float
        Nonnegative time.

    Returns
    -------
    (n,) numpy.ndarray
    """
    A = as_matrix(A, "A")
    x0 = as_vector(x0, "x0")
    n, ncols = A.shape
    if n != ncols:
        raise ValueError(f"A must be square, got shape {A.shape}")
    if x0.shape[0] != n:
        raise ValueError(f"x0 has length {x0.shape[0]}, expected {n}")
    if t < 0:
        raise ValueError("t must be nonnegative")

    B = A * t
    norm = float(np.max(np.sum(np.abs(B), axis=1))) if n else 0.0
    s = 0
    if norm > 0.25:
        s = int(np.ceil(np.log2(norm / 0.25)))
    C = B / (2.0**s)

    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 40):
        term = term @ C / k
        E += term
        if np.max(np.abs(term)) <= 1e-18 * max(1.0, float(np.max(np.abs(E)))):
            break
    for _ in range(s):
        E = E @ E
    return E @ x0
