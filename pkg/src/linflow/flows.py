"""Right-hand sides of the network flows.

Every node carries a state in R^m and an affine constraint set. The flows
combine a diffusive consensus term over the current digraph with some form
of pull toward the node's own set:

- consensus_projection:    dx_i = K * sum_j a_ij (x_j - x_i) + gamma * (P_i(x_i) - x_i)
- projection_consensus:    dx_i = sum_j a_ij (P_i(x_j) - P_i(x_i))
- projection_consensus_augmented: the previous plus (P_i(x_i) - x_i)
- consensus_projection_decay:     K * consensus plus (1/t) * (P_i(x_i) - x_i)

With ``normalized=False`` the consensus_projection pull is the raw
least-squares gradient -sum_k h_k (h_k'x - z_k) over the node's rows,
which coincides with P_i(x_i) - x_i when the node holds one unit row.

All kinds except the 1/t one are affine and time-invariant while the graph
is constant; ``affine_parts`` exposes that form for exact integration.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .affine import AffinePatch
from .errors import DimensionMismatchError, TimeZeroDecayError
from .graphsig import laplacian

__all__ = [
    "KIND_CONSENSUS_PROJECTION",
    "KIND_PROJECTION_CONSENSUS",
    "KIND_PROJECTION_CONSENSUS_AUGMENTED",
    "KIND_CONSENSUS_PROJECTION_DECAY",
    "FLOW_KINDS",
    "FlowSpec",
    "rhs",
    "affine_parts",
    "rhs_disturbed_consensus",
]

KIND_CONSENSUS_PROJECTION = "consensus_projection"
KIND_PROJECTION_CONSENSUS = "projection_consensus"
KIND_PROJECTION_CONSENSUS_AUGMENTED = "projection_consensus_augmented"
KIND_CONSENSUS_PROJECTION_DECAY = "consensus_projection_decay"

FLOW_KINDS = (
    KIND_CONSENSUS_PROJECTION,
    KIND_PROJECTION_CONSENSUS,
    KIND_PROJECTION_CONSENSUS_AUGMENTED,
    KIND_CONSENSUS_PROJECTION_DECAY,
)


@dataclasses.dataclass(frozen=True)
class FlowSpec:
    """Which flow to run, its gains, and the per-node constraint sets."""

    kind: str
    patches: tuple[AffinePatch, ...]
    K: float = 1.0
    gamma: float = 1.0
    normalized: bool = True

    def __post_init__(self):
        if self.kind not in FLOW_KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}; choose from {FLOW_KINDS}")
        patches = tuple(self.patches)
        if not patches:
            raise ValueError("a flow needs at least one node patch")
        m = patches[0].m
        for k, p in enumerate(patches):
            if p.m != m:
                raise DimensionMismatchError(f"patch {k} lives in R^{p.m}, expected R^{m}")
        object.__setattr__(self, "patches", patches)
        if self.K <= 0:
            raise ValueError(f"K must be positive, got {self.K}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.normalized and self.kind != KIND_CONSENSUS_PROJECTION:
            raise ValueError("the raw-row gradient form exists only for consensus_projection")

    @property
    def n(self):
        return len(self.patches)

    @property
    def m(self):
        return self.patches[0].m


def _check_state(spec, graph, X):
    X = np.asarray(X, dtype=float)
    if X.shape != (spec.n, spec.m):
        raise DimensionMismatchError(
            f"state has shape {X.shape}, expected ({spec.n}, {spec.m})"
        )
    if graph.n != spec.n:
        raise DimensionMismatchError(f"graph has {graph.n} nodes, flow has {spec.n}")
    return X


def _pull_term(spec, X):
    """Per-node pull toward the own set: gamma-free, shape (n, m)."""
    out = np.empty_like(X)
    if spec.kind == KIND_CONSENSUS_PROJECTION and not spec.normalized:
        for i, p in enumerate(spec.patches):
            out[i] = p.rows.T @ (p.z - p.rows @ X[i])
    else:
        for i, p in enumerate(spec.patches):
            out[i] = p.project(X[i]) - X[i]
    return out


def rhs(spec, graph, X, t=0.0):
    """Stacked derivative of the chosen flow at state X and time t.

    The time only matters for the 1/t kind, which is undefined at t <= 0.
    """
    X = _check_state(spec, graph, X)
    L = laplacian(graph)
    cons = -(L @ X)
    if spec.kind == KIND_PROJECTION_CONSENSUS:
        return np.stack([p.tangent_project(cons[i]) for i, p in enumerate(spec.patches)])
    if spec.kind == KIND_PROJECTION_CONSENSUS_AUGMENTED:
        proj = np.stack([p.tangent_project(cons[i]) for i, p in enumerate(spec.patches)])
        return proj + _pull_term(spec, X)
    if spec.kind == KIND_CONSENSUS_PROJECTION_DECAY:
        if t <= 0:
            raise TimeZeroDecayError(f"the 1/t gain needs t > 0, got t = {t}")
        return spec.K * cons + (1.0 / t) * _pull_term(spec, X)
    return spec.K * cons + spec.gamma * _pull_term(spec, X)


def affine_parts(spec, graph):
    """The flow as d(vec x)/dt = F vec(x) + g for a constant graph.

    Valid for every kind except the 1/t one, whose gain is time-varying.
    States stack row-major: vec(x) = (x_1', ..., x_n')'.
    """
    if spec.kind == KIND_CONSENSUS_PROJECTION_DECAY:
        raise ValueError("the 1/t kind has no time-invariant affine form")
    if graph.n != spec.n:
        raise DimensionMismatchError(f"graph has {graph.n} nodes, flow has {spec.n}")
    n, m = spec.n, spec.m
    L = laplacian(graph)
    F = np.zeros((n * m, n * m))
    g = np.zeros(n * m)
    if spec.kind == KIND_CONSENSUS_PROJECTION:
        F -= spec.K * np.kron(L, np.eye(m))
        for i, p in enumerate(spec.patches):
            s = slice(i * m, (i + 1) * m)
            if spec.normalized:
                F[s, s] -= spec.gamma * (np.eye(m) - p.tangent_matrix)
                g[s] = spec.gamma * p.anchor
            else:
                F[s, s] -= spec.gamma * (p.rows.T @ p.rows)
                g[s] = spec.gamma * (p.rows.T @ p.z)
    else:
        Lk = np.kron(L, np.eye(m))
        for i, p in enumerate(spec.patches):
            s = slice(i * m, (i + 1) * m)
            F[s, :] = -p.tangent_matrix @ Lk[s, :]
            if spec.kind == KIND_PROJECTION_CONSENSUS_AUGMENTED:
                F[s, s] -= np.eye(m) - p.tangent_matrix
                g[s] = p.anchor
    return F, g


def rhs_disturbed_consensus(K, graph, q, w):
    """Scalar consensus with an additive disturbance: dq = -K L q + w.

    Used to probe how strongly the consensus part suppresses a bounded
    per-node disturbance as K grows.
    """
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    if q.shape != (graph.n,) or w.shape != (graph.n,):
        raise DimensionMismatchError(
            f"q and w must have shape ({graph.n},), got {q.shape} and {w.shape}"
        )
    return -K * (laplacian(graph) @ q) + w
