"""Closed-form predictions and spectral diagnostics.

For consistent systems the flows converge to a point of the joint solution
set determined by the initial states alone: the plain average of their
projections when the coupling stays balanced, or a stationary-weighted
average on a fixed strongly connected digraph. For inconsistent systems on
fixed bidirectional graphs the consensus-plus-projection flow is linear
time-invariant; its equilibrium, spectrum, and distance to the least
squares solution quantify how the consensus gain K trades disagreement
against bias.
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np

from . import numkit
from .errors import PreconditionError
from .graphsig import is_bidirectional, is_symmetric, laplacian, left_eigenvector

__all__ = [
    "LimitPrediction",
    "LtiReport",
    "predict_limit_balanced",
    "predict_limit_fixed",
    "lti_analysis",
    "flow_potential",
    "monitor_potential",
    "coherence",
    "ls_objective",
    "monitor_ls_objective_average",
]


@dataclasses.dataclass(frozen=True)
class LimitPrediction:
    """Predicted common limit of all node states for a consistent system."""

    limit: np.ndarray
    method: str
    weights: np.ndarray | None = None

    def to_dict(self):
        out = {"limit": self.limit.tolist(), "method": self.method}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        return out


def predict_limit_balanced(sys, x0):
    """Limit under balanced connective coupling: mean of projected starts.

    Raises EmptyIntersectionError when the system has no exact solution.
    """
    x0 = np.asarray(x0, dtype=float)
    patch = sys.intersection_patch()
    projections = np.stack([patch.project(v) for v in x0])
    limit = projections.mean(axis=0)
    return LimitPrediction(limit=limit, method="balanced-average")


def predict_limit_fixed(sys, x0, graph):
    """Limit on a fixed strongly connected digraph: stationary-weighted mean.

    The weights are the positive left null-vector of the Laplacian, so an
    unbalanced graph pulls the limit toward the nodes it favors.
    """
    x0 = np.asarray(x0, dtype=float)
    patch = sys.intersection_patch()
    w = left_eigenvector(graph)
    if len(w) != x0.shape[0]:
        raise ValueError(f"graph has {len(w)} nodes but x0 has {x0.shape[0]} rows")
    projections = np.stack([patch.project(v) for v in x0])
    limit = w @ projections
    return LimitPrediction(limit=limit, method="stationary-weighted", weights=w)


@dataclasses.dataclass(frozen=True)
class LtiReport:
    """Equilibrium and spectrum of the fixed-graph consensus-projection flow.

    The stacked dynamics are dx/dt = -M x + b with M = K (L kron I_m) + J,
    J the block diagonal of the rows' outer products, and b the stacked
    z_i h_i. ``equilibrium`` solves M v = b; ``gap`` is the distance from
    the equilibrium mean to the least squares solution and shrinks as K
    grows, while ``spread`` measures how far the per-node equilibria
    scatter around their mean.
    """

    K: float
    matrix: np.ndarray
    equilibrium: np.ndarray
    equilibrium_mean: np.ndarray
    lambda_min: float
    lambda_two: float
    spread: float
    gap: float
    least_squares: np.ndarray

    def to_dict(self):
        return {
            "K": self.K,
            "equilibrium": self.equilibrium.tolist(),
            "equilibrium_mean": self.equilibrium_mean.tolist(),
            "lambda_min": self.lambda_min,
            "lambda_two": self.lambda_two,
            "spread": self.spread,
            "gap": self.gap,
            "least_squares": self.least_squares.tolist(),
        }


def lti_analysis(sys, graph, K):
    """Analyze the fixed-graph consensus-projection flow at gain K.

    Preconditions (each violation raises PreconditionError): unit-norm
    rows, a bidirectional graph with symmetric weights, and full column
    rank so the least squares solution is unique.
    """
    if not sys.normalized:
        raise PreconditionError("rows must be unit-norm; build the system with normalize=True")
    if graph.n != sys.N:
        raise PreconditionError(f"graph has {graph.n} nodes but the system has {sys.N} rows")
    if not (is_bidirectional(graph) and is_symmetric(graph)):
        raise PreconditionError("the coupling graph must be bidirectional with symmetric weights")
    if numkit.rank(sys.H) != sys.m:
        raise PreconditionError("the coefficient matrix must have full column rank")
    if K <= 0:
        raise PreconditionError(f"the consensus gain must be positive, got {K}")

    n, m = sys.N, sys.m
    L = laplacian(graph)
    M = K * np.kron(L, np.eye(m))
    for i in range(n):
        s = slice(i * m, (i + 1) * m)
        M[s, s] += np.outer(sys.H[i], sys.H[i])
    b = (sys.z[:, None] * sys.H).ravel()

    eigenvalues, _ = numkit.symmetric_eigen(M)
    lambda_min = float(eigenvalues[0])
    if lambda_min <= 1e-12:
        raise PreconditionError(
            "the flow matrix is not positive definite; "
            "the graph may be disconnected or the rows rank deficient"
        )
    lap_eigen, _ = numkit.symmetric_eigen(L)
    lambda_two = float(lap_eigen[1]) if n > 1 else 0.0

    v = numkit.solve_linear(M, b).reshape(n, m)
    v_mean = v.mean(axis=0)
    y_star = numkit.least_squares(sys.H, sys.z)
    return LtiReport(
        K=float(K),
        matrix=M,
        equilibrium=v,
        equilibrium_mean=v_mean,
        lambda_min=lambda_min,
        lambda_two=lambda_two,
        spread=float(np.linalg.norm(v - v_mean, axis=1).sum()),
        gap=float(np.linalg.norm(v_mean - y_star)),
        least_squares=y_star,
    )


def flow_potential(patches, graph, K, X):
    """Energy 0.5 sum_i dist(x_i, set_i)^2 + (K/2) x'(L kron I)x.

    The consensus-projection flow with gamma = 1 is the negative gradient
    flow of this function on bidirectional graphs with symmetric weights,
    so it must not increase along trajectories.
    """
    if not is_symmetric(graph):
        raise PreconditionError("the potential needs a graph with symmetric weights")
    X = np.asarray(X, dtype=float)
    own = sum(p.distance(X[i]) ** 2 for i, p in enumerate(patches))
    L = laplacian(graph)
    flat = X.ravel()
    quad = flat @ (np.kron(L, np.eye(X.shape[1])) @ flat)
    return 0.5 * own + 0.5 * K * quad


def monitor_potential(traj, patches, graph, K):
    """flow_potential evaluated along a trajectory, shape (S,)."""
    return np.array([flow_potential(patches, graph, K, X) for X in traj.states])


def coherence(sys):
    """Largest squared cosine between distinct row normals.

    Values below 1 bound how fast alternating projections contract; a
    repeated (parallel) row makes the bound vacuous, so that case returns
    1.0 with a warning instead of an error.
    """
    if not sys.normalized:
        raise PreconditionError("rows must be unit-norm; build the system with normalize=True")
    if sys.N < 2:
        return 0.0
    gram = sys.H @ sys.H.T
    sq = gram[np.triu_indices(sys.N, k=1)] ** 2
    worst = float(np.max(sq))
    if worst >= 1.0 - 1e-12:
        warnings.warn("parallel rows present; coherence 1 makes contraction bounds vacuous")
        return 1.0
    return worst


def ls_objective(sys, y):
    """Residual energy ||z - Hy||^2 of a candidate solution.

    For unit rows this equals the sum of squared distances to the row
    sets; both are evaluated and cross-checked before returning.
    """
    if not sys.normalized:
        raise PreconditionError("rows must be unit-norm; build the system with normalize=True")
    y = numkit.as_vector(y, "y")
    r = sys.z - sys.H @ y
    value = float(r @ r)
    by_distance = float(sum(p.distance(y) ** 2 for p in sys.planes()))
    if abs(value - by_distance) > 1e-10 * max(1.0, value):
        raise AssertionError(
            f"residual energy {value} disagrees with summed squared distances {by_distance}"
        )
    return value


def monitor_ls_objective_average(traj, sys):
    """ls_objective of the mean state along a trajectory, shape (S,)."""
    means = traj.states.mean(axis=1)
    return np.array([ls_objective(sys, y) for y in means])
