"""Shared generators for randomized tests. Deterministic given the rng."""

import numpy as np

from linflow import GraphSignal, LinearSystem, SignalMode, WeightedDigraph

# fixed inconsistent companion case: a weighted path graph breaks the
# symmetry that makes the packaged sweep's equilibrium mean exact, so the
# gain sweep shows a genuinely shrinking least-squares gap
COMPANION_GRAPH = WeightedDigraph.from_arcs(
    4,
    [(0, 1, 0.7), (1, 0, 0.7), (1, 2, 1.3), (2, 1, 1.3), (2, 3, 0.4), (3, 2, 0.4)],
)
COMPANION_SYS = LinearSystem(
    np.array([[1.0, 0.0], [0.6, 0.8], [0.8, -0.6], [0.28, 0.96]]),
    np.array([1.0, -0.5, 0.25, 2.0]),
)


def random_unit_rows(rng, n, m):
    H = rng.normal(size=(n, m))
    norms = np.linalg.norm(H, axis=1)
    while (norms < 1e-3).any():
        H[norms < 1e-3] = rng.normal(size=(int((norms < 1e-3).sum()), m))
        norms = np.linalg.norm(H, axis=1)
    return H / norms[:, None]


def random_consistent_system(rng, n, m):
    """A Case I/II system: z built from a planted solution."""
    H = random_unit_rows(rng, n, m)
    y = rng.normal(size=m)
    return LinearSystem.from_rows(H, H @ y), y


def random_strongly_connected_graph(rng, n):
    """A random cycle plus a few extra arcs, random positive weights."""
    order = rng.permutation(n)
    W = np.zeros((n, n))
    for k in range(n):
        src, dst = order[k], order[(k + 1) % n]
        W[dst, src] = rng.uniform(0.5, 2.0)
    for _ in range(n):
        i, j = rng.integers(0, n, size=2)
        if i != j:
            W[i, j] = rng.uniform(0.5, 2.0)
    return WeightedDigraph(W)


def random_switching_signal(rng, n):
    """Periodic two-segment signal whose union is strongly connected.

    Each segment holds a nonempty share of the arcs, so single segments
    are typically not connected while every period is.
    """
    g = random_strongly_connected_graph(rng, n)
    arcs = np.argwhere(g.weights > 0)
    pick = rng.random(len(arcs)) < 0.5
    if pick.all() or not pick.any():
        pick[0] = not pick[0]
    Wa = np.zeros((n, n))
    Wb = np.zeros((n, n))
    for (i, j), in_a in zip(arcs, pick):
        (Wa if in_a else Wb)[i, j] = g.weights[i, j]
    durations = rng.uniform(0.3, 0.8, size=2)
    return GraphSignal(
        [(float(durations[0]), WeightedDigraph(Wa)), (float(durations[1]), WeightedDigraph(Wb))],
        SignalMode.PERIODIC,
    )
