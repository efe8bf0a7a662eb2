"""Weighted digraphs, piecewise-constant graph schedules, and connectivity checks.

Couplings are directed: ``weights[i][j]`` is the gain node i applies to the
relative state of node j, so a positive entry is an arc from j to i. A
GraphSignal plays a finite list of (duration, graph) segments either
periodically or holding the last graph forever; weights are constant within
a segment, which keeps every windowed arc integral exact.
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from . import numkit
from .errors import NotStronglyConnectedError

__all__ = [
    "WeightedDigraph",
    "SignalMode",
    "GraphSignal",
    "WindowCheck",
    "ConnectivityReport",
    "graph_at",
    "arc_integral",
    "check_connectivity",
    "is_balanced",
    "is_bidirectional",
    "is_strongly_connected",
    "is_symmetric",
    "laplacian",
    "left_eigenvector",
]


class WeightedDigraph:
    """A fixed weighted digraph on n nodes.

    Parameters
    ----------
    weights : (n, n) array_like
        Nonnegative gains with zero diagonal; weights[i][j] > 0 means an
        arc from j to i carrying that weight.
    """

    __slots__ = ("weights",)

    def __init__(self, weights):
        W = numkit.as_matrix(weights, "weights")
        if W.shape[0] != W.shape[1]:
            raise ValueError(f"weights must be square, got {W.shape}")
        if np.any(W < 0):
            raise ValueError("arc weights must be nonnegative")
        if np.any(np.diagonal(W) != 0):
            raise ValueError("self-loops are not allowed (diagonal must be zero)")
        W.setflags(write=False)
        self.weights = W

    @classmethod
    def from_arcs(cls, n, arcs):
        """Build from (src, dst, weight) triples; src -> dst information flow."""
        W = np.zeros((n, n))
        for src, dst, w in arcs:
            if src == dst:
                raise ValueError(f"self-loop on node {src}")
            W[dst, src] = w
        return cls(W)

    @classmethod
    def directed_cycle(cls, n, weight=1.0):
        """The cycle 0 -> 1 -> ... -> n-1 -> 0."""
        return cls.from_arcs(n, [(i, (i + 1) % n, weight) for i in range(n)])

    @classmethod
    def undirected_cycle(cls, n, weight=1.0):
        """The n-cycle with arcs in both directions."""
        arcs = []
        for i in range(n):
            j = (i + 1) % n
            arcs += [(i, j, weight), (j, i, weight)]
        return cls.from_arcs(n, arcs)

    @classmethod
    def complete(cls, n, weight=1.0):
        W = np.full((n, n), float(weight))
        np.fill_diagonal(W, 0.0)
        return cls(W)

    @property
    def n(self):
        return self.weights.shape[0]

    def max_weight(self):
        return float(np.max(self.weights)) if self.n else 0.0

    def __repr__(self):
        arcs = int(np.count_nonzero(self.weights))
        return f"WeightedDigraph(n={self.n}, arcs={arcs})"


class SignalMode(enum.Enum):
    """What the schedule does after its last declared segment."""

    PERIODIC = "periodic"
    HOLD_LAST = "hold-last"


class GraphSignal:
    """Piecewise-constant schedule of weighted digraphs on a common node set.

    The graph is right-continuous in time: at a switch instant the new
    segment's graph already applies.

    Parameters
    ----------
    segments : sequence of (duration, WeightedDigraph)
        Durations must be positive; node counts must agree.
    mode : SignalMode or str
        "periodic" repeats the segment list forever; "hold-last" keeps the
        final graph after the declared segments run out.
    a_star : float, optional
        Uniform weight bound. Defaults to the largest weight present;
        an explicit bound below some weight is rejected.
    """

    def __init__(self, segments, mode=SignalMode.HOLD_LAST, a_star=None):
        segments = [(float(d), g) for d, g in segments]
        if not segments:
            raise ValueError("a signal needs at least one segment")
        n = segments[0][1].n
        for k, (d, g) in enumerate(segments):
            if d <= 0:
                raise ValueError(f"segment {k} has nonpositive duration {d}")
            if g.n != n:
                raise ValueError(f"segment {k} has {g.n} nodes, expected {n}")
        self.segments = tuple(segments)
        self.mode = SignalMode(mode)
        top = max(g.max_weight() for _, g in segments)
        if a_star is None:
            a_star = top if top > 0 else 1.0
        if top > a_star:
            raise ValueError(f"weight {top} exceeds the declared bound {a_star}")
        self.a_star = float(a_star)
        bounds = np.cumsum([0.0] + [d for d, _ in segments])
        self._bounds = bounds  # length S+1, starts at 0
        self.period = float(bounds[-1])

    @classmethod
    def fixed(cls, graph):
        """A constant graph for all time."""
        return cls([(1.0, graph)], SignalMode.HOLD_LAST)

    @property
    def n(self):
        return self.segments[0][1].n

    @property
    def is_fixed(self):
        first = self.segments[0][1].weights
        return all(np.array_equal(first, g.weights) for _, g in self.segments[1:])

    def graph_index_at(self, t):
        if t < 0:
            raise ValueError(f"time must be nonnegative, got {t}")
        if self.mode is SignalMode.PERIODIC:
            t = t % self.period
        elif t >= self._bounds[-1]:
            return len(self.segments) - 1
        # right-continuous: segment k covers [bounds[k], bounds[k+1])
        k = int(np.searchsorted(self._bounds, t, side="right")) - 1
        return min(max(k, 0), len(self.segments) - 1)

    def graph_at(self, t):
        return self.segments[self.graph_index_at(t)][1]

    def switch_times(self, upto):
        """Ascending graph-change instants in (0, upto]."""
        out = []
        if self.mode is SignalMode.PERIODIC:
            k = 0
            while True:
                base = k * self.period
                for b in self._bounds[1:]:
                    t = base + b
                    if t > upto:
                        return out
                    out.append(t)
                k += 1
        for b in self._bounds[1:-1]:
            if b > upto:
                break
            out.append(float(b))
        return out

    def pieces(self, t1, t2):
        """Maximal constant-graph intervals (a, b, graph) covering [t1, t2)."""
        if not 0 <= t1 < t2:
            raise ValueError(f"need 0 <= t1 < t2, got [{t1}, {t2})")
        cuts = [t1] + [t for t in self.switch_times(t2) if t1 < t < t2] + [t2]
        return [(a, b, self.graph_at(a)) for a, b in zip(cuts[:-1], cuts[1:])]

    def __repr__(self):
        return (
            f"GraphSignal(n={self.n}, segments={len(self.segments)}, "
            f"mode={self.mode.value}, period={self.period})"
        )


def graph_at(signal, t):
    """The digraph in force at time t (right-continuous at switches)."""
    return signal.graph_at(t)


def _integral_matrix(signal, t1, t2):
    total = np.zeros((signal.n, signal.n))
    for a, b, g in signal.pieces(t1, t2):
        total += (b - a) * g.weights
    return total


def arc_integral(signal, i, j, t1, t2):
    """Exact integral of the arc weight from j to i over [t1, t2)."""
    total = 0.0
    for a, b, g in signal.pieces(t1, t2):
        total += (b - a) * g.weights[i, j]
    return total


def laplacian(graph):
    """L = D - A with D the diagonal of in-weight row sums; row sums are zero."""
    A = graph.weights
    return np.diag(A.sum(axis=1)) - A


def is_balanced(graph, tol=1e-12):
    """Whether every node's total in-weight equals its total out-weight."""
    A = graph.weights
    return bool(np.max(np.abs(A.sum(axis=1) - A.sum(axis=0)), initial=0.0) <= tol)


def is_bidirectional(graph):
    """Whether every arc is matched by a reverse arc (weights may differ)."""
    present = graph.weights > 0
    return bool(np.array_equal(present, present.T))


def is_symmetric(graph, tol=1e-12):
    A = graph.weights
    return bool(np.max(np.abs(A - A.T), initial=0.0) <= tol)


def _connected_both_ways(adj):
    """Strong connectivity of a boolean arc matrix (adj[i][j]: arc j -> i)."""
    n = adj.shape[0]
    for mat in (adj, adj.T):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            j = stack.pop()
            for i in np.nonzero(mat[:, j])[0]:
                if not seen[i]:
                    seen[i] = True
                    stack.append(int(i))
        if not seen.all():
            return False
    return True


def is_strongly_connected(graph):
    """Whether every node can reach every other along positive arcs."""
    return _connected_both_ways(graph.weights > 0)


def _connected_undirected(adj):
    return _connected_both_ways(adj | adj.T)


def left_eigenvector(graph):
    """Positive left null-vector of the Laplacian, normalized to sum 1.

    For a strongly connected graph the Laplacian's zero eigenvalue is
    simple, so w is the unique solution of w'L = 0 with sum(w) = 1; it
    weights the initial states in fixed-graph limit formulas.
    """
    if not is_strongly_connected(graph):
        raise NotStronglyConnectedError("the graph is not strongly connected")
    L = laplacian(graph)
    n = graph.n
    A = np.vstack([L.T, np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    w = numkit.least_squares(A, rhs)
    if np.any(w <= 0):
        raise NotStronglyConnectedError("left null-vector is not positive")
    return w


@dataclasses.dataclass(frozen=True)
class WindowCheck:
    """Connectivity verdict for one window of integrated arcs."""

    start: float
    connected: bool
    arc_count: int

    def to_dict(self):
        return {
            "start": self.start,
            "connected": self.connected,
            "arc_count": self.arc_count,
        }


@dataclasses.dataclass(frozen=True)
class ConnectivityReport:
    """Joint-connectivity verdicts for a graph signal.

    ``jointly_connected`` holds when the arcs whose weight integrates to at
    least ``delta`` over every length-``window`` interval form a strongly
    connected digraph. ``tail_connected`` holds when the arcs with
    unbounded total weight form a connected graph over every infinite
    tail; under the piecewise-constant schedules used here this is decided
    exactly (per-period integrals for periodic signals, the final graph
    for hold-last signals).
    """

    delta: float
    window: float
    horizon: float
    jointly_connected: bool
    tail_connected: bool
    bidirectional: bool
    balanced: bool
    windows: tuple[WindowCheck, ...]

    def to_dict(self):
        return {
            "delta": self.delta,
            "window": self.window,
            "horizon": self.horizon,
            "jointly_connected": self.jointly_connected,
            "tail_connected": self.tail_connected,
            "bidirectional": self.bidirectional,
            "balanced": self.balanced,
            "windows": [w.to_dict() for w in self.windows],
        }


def _window_starts(signal, T, horizon, delta):
    """Window starts that decide joint connectivity for every start in [0, horizon).

    The integral of an arc weight over [s, s+T) is piecewise-linear in s
    with breakpoints where s or s+T crosses a segment boundary. Between
    breakpoints an arc's presence can still flip once where the linear
    integral crosses delta, so the refinement adds those crossings; on the
    resulting partition the windowed arc set is constant, and evaluating
    each cell's midpoint (plus the breakpoints) covers every start.
    """
    s_hi = horizon
    if signal.mode is SignalMode.PERIODIC:
        s_hi = min(horizon, signal.period)
    anchors = {0.0, s_hi}
    for t in signal.switch_times(s_hi + T):
        if t < s_hi:
            anchors.add(t)
        if 0.0 < t - T < s_hi:
            anchors.add(t - T)
    anchors = sorted(anchors)
    vals = {s: _integral_matrix(signal, s, s + T) for s in anchors}
    thr = delta - 1e-9 * max(1.0, delta)
    points = set(anchors)
    for a, b in zip(anchors[:-1], anchors[1:]):
        fa = vals[a] - thr
        fb = vals[b] - thr
        for i, j in zip(*np.nonzero(fa * fb < 0)):
            s = a + float(fa[i, j] / (fa[i, j] - fb[i, j])) * (b - a)
            if a < s < b:
                points.add(s)
    points = sorted(points)
    starts = [s for s in points if s < s_hi]
    starts += [0.5 * (a + b) for a, b in zip(points[:-1], points[1:])]
    return sorted(starts), thr


def check_connectivity(signal, window, delta, horizon):
    """Test joint and tail connectivity of a graph signal.

    Parameters
    ----------
    signal : GraphSignal
    window : float
        Length T of the sliding integration window.
    delta : float
        Minimum integrated weight for an arc to count inside a window.
    horizon : float
        Window starts in [0, horizon) are covered; for periodic signals
        one period of starts already decides all of them.

    Returns
    -------
    ConnectivityReport
    """
    T = float(window)
    delta = float(delta)
    horizon = float(horizon)
    if T <= 0 or delta <= 0 or horizon <= 0:
        raise ValueError("window, delta, and horizon must be positive")

    starts, thr = _window_starts(signal, T, horizon, delta)
    windows = []
    for s in starts:
        adj = _integral_matrix(signal, s, s + T) >= thr
        windows.append(
            WindowCheck(
                start=s,
                connected=_connected_both_ways(adj),
                arc_count=int(np.count_nonzero(adj)),
            )
        )
    jointly = all(w.connected for w in windows)

    if signal.mode is SignalMode.PERIODIC:
        per_period = _integral_matrix(signal, 0.0, signal.period)
        tail = _connected_undirected(per_period > 0)
    else:
        tail = _connected_undirected(signal.segments[-1][1].weights > 0)

    return ConnectivityReport(
        delta=delta,
        window=T,
        horizon=horizon,
        jointly_connected=jointly,
        tail_connected=tail,
        bidirectional=all(is_bidirectional(g) for _, g in signal.segments),
        balanced=all(is_balanced(g) for _, g in signal.segments),
        windows=tuple(windows),
    )
