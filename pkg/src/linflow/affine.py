"""Affine constraint sets and their exact projectors.

Each network node owns an affine subspace of R^m cut out by one or more
linear equations h'y = z. This module provides single hyperplanes,
multi-row patches with a cached orthonormalized projector, whole-system
bookkeeping (row normalization, solvability classification), projection
onto the joint intersection, and two small diagnostic probes used by the
analysis layer.
"""

from __future__ import annotations

import enum

import numpy as np

from . import numkit
from .errors import (
    EmptyIntersectionError,
    InconsistentPatchError,
    PreconditionError,
    ZeroRowError,
)

__all__ = [
    "CaseLabel",
    "Hyperplane",
    "AffinePatch",
    "LinearSystem",
    "normalize_system",
    "classify",
    "project_intersection",
    "check_origin_symmetry",
    "probe_projection_boundedness",
]

RANK_TOL = 1e-9


class CaseLabel(enum.Enum):
    """Solvability regime of a row system z = Hy."""

    UNIQUE = "unique"
    UNDERDETERMINED = "underdetermined"
    INCONSISTENT = "inconsistent"

    @property
    def consistent(self):
        return self is not CaseLabel.INCONSISTENT


class Hyperplane:
    """The set {y : h'y = z} for a unit normal h.

    Parameters
    ----------
    h : (m,) array_like
        Normal vector with unit Euclidean norm (within 1e-12).
    z : float
        Offset along the normal.
    """

    __slots__ = ("h", "z")

    def __init__(self, h, z):
        h = numkit.as_vector(h, "h")
        if abs(np.linalg.norm(h) - 1.0) > 1e-12:
            raise ValueError("normal vector must have unit norm; use from_raw to rescale")
        h.setflags(write=False)
        self.h = h
        self.z = float(z)

    @classmethod
    def from_raw(cls, h_raw, z_raw):
        """Build a hyperplane from an unnormalized row, rescaling both sides."""
        h = numkit.as_vector(h_raw, "h")
        nrm = float(np.linalg.norm(h))
        if nrm < 1e-12:
            raise ZeroRowError("row has zero norm")
        return cls(h / nrm, float(z_raw) / nrm)

    @property
    def m(self):
        return self.h.shape[0]

    def project(self, y):
        """Nearest point of the plane to ``y``: (I - hh')y + zh."""
        y = np.asarray(y, dtype=float)
        return y - self.h * (self.h @ y - self.z)

    def distance(self, y):
        """Euclidean distance from ``y`` to the plane."""
        return abs(float(self.h @ np.asarray(y, dtype=float) - self.z))

    def contains(self, y, tol=1e-9):
        return self.distance(y) <= tol

    def __repr__(self):
        return f"Hyperplane(h={self.h.tolist()}, z={self.z})"


class AffinePatch:
    """One node's constraint set: the intersection of one or more rows.

    The constructor row-reduces the equations to an orthonormal form
    (u_k'y = c_k with orthonormal u_k), dropping dependent rows after
    checking they do not contradict the kept ones. Projection is then a
    single exact correction, with no iteration.

    Parameters
    ----------
    rows : (n_i, m) array_like
        Raw coefficient rows; any nonzero scaling.
    z : (n_i,) array_like
        Right-hand sides, matching ``rows``.
    """

    def __init__(self, rows, z):
        rows = np.atleast_2d(numkit.as_matrix(np.atleast_2d(rows), "rows"))
        z = numkit.as_vector(np.atleast_1d(z), "z")
        if rows.shape[0] == 0:
            raise ValueError("a patch needs at least one row")
        if rows.shape[0] != z.shape[0]:
            raise ValueError(f"{rows.shape[0]} rows but {z.shape[0]} offsets")

        basis = []
        offsets = []
        for k, (row, zk) in enumerate(zip(rows, z)):
            nrm = float(np.linalg.norm(row))
            if nrm < 1e-12:
                raise ZeroRowError(f"row {k} has zero norm")
            v = row.copy()
            c = float(zk)
            for _ in range(2):  # second pass restores orthogonality lost to rounding
                for u, cu in zip(basis, offsets):
                    alpha = float(u @ v)
                    v -= alpha * u
                    c -= alpha * cu
            res = float(np.linalg.norm(v))
            if res > 1e-10 * nrm:
                basis.append(v / res)
                offsets.append(c / res)
            elif abs(c) > 1e-9 * max(1.0, abs(zk), nrm):
                raise InconsistentPatchError(
                    f"row {k} contradicts the preceding rows (defect {c:.3e})"
                )

        self.rows = rows
        self.rows.setflags(write=False)
        self.z = z
        self.z.setflags(write=False)
        self._basis = np.array(basis)  # (r, m), orthonormal rows
        self._offsets = np.array(offsets)  # (r,)
        self._tangent = np.eye(rows.shape[1]) - self._basis.T @ self._basis
        self._anchor = self._basis.T @ self._offsets  # projection of the origin

    @property
    def m(self):
        return self.rows.shape[1]

    @property
    def nrows(self):
        return self.rows.shape[0]

    @property
    def rank(self):
        return self._basis.shape[0]

    @property
    def tangent_matrix(self):
        """Orthogonal projector onto the direction subspace of the set."""
        return self._tangent

    @property
    def anchor(self):
        """Projection of the origin onto the set."""
        return self._anchor

    def project(self, y):
        """Nearest point of the set to ``y`` (least-norm row-space correction)."""
        y = np.asarray(y, dtype=float)
        return y - self._basis.T @ (self._basis @ y - self._offsets)

    def tangent_project(self, u):
        """Projection of ``u`` onto the direction subspace."""
        u = np.asarray(u, dtype=float)
        return u - self._basis.T @ (self._basis @ u)

    def distance(self, y):
        """Euclidean distance from ``y`` to the set."""
        y = np.asarray(y, dtype=float)
        return float(np.linalg.norm(self._basis @ y - self._offsets))

    def distances(self, Y):
        """Distances for a batch of points with shape (..., m)."""
        Y = np.asarray(Y, dtype=float)
        return np.linalg.norm(Y @ self._basis.T - self._offsets, axis=-1)

    def contains(self, y, tol=1e-9):
        return self.distance(y) <= tol

    def __repr__(self):
        return f"AffinePatch(nrows={self.nrows}, m={self.m}, rank={self.rank})"


class LinearSystem:
    """The full row system z = Hy with normalization bookkeeping.

    Attributes
    ----------
    H : (N, m) numpy.ndarray
    z : (N,) numpy.ndarray
    normalized : bool
        True when every row of H has unit norm within 1e-12.
    case_label : CaseLabel
        Solvability regime, fixed at construction.
    """

    def __init__(self, H, z):
        H = numkit.as_matrix(H, "H")
        z = numkit.as_vector(z, "z")
        if H.shape[0] != z.shape[0]:
            raise ValueError(f"H has {H.shape[0]} rows but z has length {z.shape[0]}")
        if H.shape[0] == 0 or H.shape[1] == 0:
            raise ValueError("system must have at least one row and one column")
        norms = np.linalg.norm(H, axis=1)
        for i, nrm in enumerate(norms):
            if nrm < 1e-12:
                raise ZeroRowError(f"row {i} has zero norm")
        H.setflags(write=False)
        z.setflags(write=False)
        self.H = H
        self.z = z
        self.normalized = bool(np.max(np.abs(norms - 1.0)) <= 1e-12)
        r = numkit.rank(H, RANK_TOL)
        r_aug = numkit.rank(np.column_stack([H, z]), RANK_TOL)
        if r_aug > r:
            self.case_label = CaseLabel.INCONSISTENT
        elif r == H.shape[1]:
            self.case_label = CaseLabel.UNIQUE
        else:
            self.case_label = CaseLabel.UNDERDETERMINED
        self._planes = None
        self._intersection = None

    @classmethod
    def from_rows(cls, H_raw, z_raw, normalize=True):
        """Build a system, optionally rescaling each row to unit norm."""
        if not normalize:
            return cls(H_raw, z_raw)
        H = numkit.as_matrix(H_raw, "H").copy()
        z = numkit.as_vector(z_raw, "z").copy()
        if H.shape[0] != z.shape[0]:
            raise ValueError(f"H has {H.shape[0]} rows but z has length {z.shape[0]}")
        for i in range(H.shape[0]):
            nrm = float(np.linalg.norm(H[i]))
            if nrm < 1e-12:
                raise ZeroRowError(f"row {i} has zero norm")
            # skipping near-unit rows keeps normalization idempotent, so a
            # serialized system reparses to bit-identical values
            if abs(nrm - 1.0) <= 4 * np.finfo(float).eps:
                continue
            H[i] /= nrm
            z[i] /= nrm
        return cls(H, z)

    @property
    def N(self):
        return self.H.shape[0]

    @property
    def m(self):
        return self.H.shape[1]

    def planes(self):
        """The rows as hyperplanes (requires a normalized system)."""
        if not self.normalized:
            raise PreconditionError("rows are not unit-norm; build with normalize=True")
        if self._planes is None:
            self._planes = tuple(Hyperplane(h, zi) for h, zi in zip(self.H, self.z))
        return self._planes

    def row_patches(self):
        """One single-row patch per row, in order."""
        return [AffinePatch(self.H[i : i + 1], self.z[i : i + 1]) for i in range(self.N)]

    def patch_for(self, indices):
        """Patch formed by the given row indices (a node's grouped rows)."""
        idx = list(indices)
        if not idx:
            raise ValueError("a node needs at least one row")
        return AffinePatch(self.H[idx], self.z[idx])

    def intersection_patch(self):
        """The joint solution set as a patch; only exists for consistent systems."""
        if self.case_label is CaseLabel.INCONSISTENT:
            raise EmptyIntersectionError("the system is inconsistent; no common point exists")
        if self._intersection is None:
            self._intersection = AffinePatch(self.H, self.z)
        return self._intersection

    def least_squares_solution(self):
        """The minimizer of ||Hy - z||; unique when rank(H) = m."""
        return numkit.least_squares(self.H, self.z, RANK_TOL)

    def __repr__(self):
        return (
            f"LinearSystem(N={self.N}, m={self.m}, normalized={self.normalized}, "
            f"case={self.case_label.value})"
        )


def normalize_system(H_raw, z_raw):
    """Rescale every row of (H, z) to a unit normal; the solution sets are unchanged."""
    return LinearSystem.from_rows(H_raw, z_raw, normalize=True)


def classify(sys):
    """Solvability regime of the system (unique / underdetermined / inconsistent)."""
    return sys.case_label


def project_intersection(y, sys):
    """Nearest point of the joint solution set to ``y``.

    Parameters
    ----------
    y : (m,) array_like
    sys : LinearSystem
        Must be consistent.

    Raises
    ------
    EmptyIntersectionError
        If the system is inconsistent (no common point).
    """
    return sys.intersection_patch().project(y)


def check_origin_symmetry(planes):
    """Whether the projections of the origin onto the planes sum to zero.

    Several balanced-graph results for inconsistent systems hinge on this
    symmetry. The projection of the origin onto {h'y = z} is zh, so the
    defect is simply the sum of z_i h_i.

    Parameters
    ----------
    planes : iterable of Hyperplane

    Returns
    -------
    holds : bool
        True when the defect norm is at most 1e-10.
    defect : numpy.ndarray
        The sum of the origin projections.
    """
    planes = list(planes)
    defect = np.zeros(planes[0].m) if planes else np.zeros(0)
    for p in planes:
        defect = defect + p.z * p.h
    return bool(np.linalg.norm(defect) <= 1e-10), defect


def probe_projection_boundedness(planes, y0, max_len=32, trials=100, seed=0):
    """Heuristic boundedness probe for repeated projections.

    Applies random sequences of single-plane projections to ``y0`` and
    records the largest norm seen after any projection. A bounded result
    is evidence, not proof: boundedness of the full sequence set is not
    decidable from finitely many samples.

    Parameters
    ----------
    planes : sequence of Hyperplane
    y0 : (m,) array_like
    max_len : int
        Projections per trial, >= 1.
    trials : int
        Number of random sequences, >= 1.
    seed : int
        Seed for the sequence draws; fixed seed means fixed output.

    Returns
    -------
    float
        Maximum norm observed across all trials.
    """
    planes = list(planes)
    if max_len < 1 or trials < 1:
        raise ValueError("max_len and trials must be at least 1")
    y0 = numkit.as_vector(y0, "y0")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        y = y0
        for _ in range(max_len):
            y = planes[int(rng.integers(len(planes)))].project(y)
            worst = max(worst, float(np.linalg.norm(y)))
    return worst
