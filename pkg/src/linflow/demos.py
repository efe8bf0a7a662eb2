"""Built-in demonstration cases used by the reproduce subcommand and tests.

Three small systems cover the solvability regimes on desk-scale graphs:

1. unique solution, three unit rows in R^2, directed 3-cycle;
2. a line of solutions, the same rows padded to R^3, directed 3-cycle;
3. no exact solution, four unit rows in R^2 (two repeated directions),
   undirected 4-cycle, meant to be swept over consensus gains.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .affine import LinearSystem
from .graphsig import GraphSignal, WeightedDigraph

__all__ = ["DemoCase", "get_demo", "DEMO_INDICES"]

_S = 1.0 / np.sqrt(2.0)

DEMO_INDICES = (1, 2, 3)


@dataclasses.dataclass(frozen=True)
class DemoCase:
    """One packaged system, coupling graph, and initial condition."""

    index: int
    title: str
    sys: LinearSystem
    signal: GraphSignal
    x0: np.ndarray
    t_end: float
    step: float = 1e-3
    gains: tuple[float, ...] = ()


def _demo_unique():
    H = [[-_S, _S], [0.0, 1.0], [_S, _S]]
    z = [_S, 1.0, _S]
    x0 = np.array([[-2.0, -1.0], [5.0, 1.0], [4.0, -3.0]])
    return DemoCase(
        index=1,
        title="unique solution on a three-node unit-weight cycle",
        sys=LinearSystem.from_rows(H, z),
        signal=GraphSignal.fixed(WeightedDigraph.undirected_cycle(3)),
        x0=x0,
        t_end=40.0,
    )


def _demo_underdetermined():
    H = [[-_S, _S, 0.0], [0.0, 1.0, 0.0], [_S, _S, 0.0]]
    z = [_S, 1.0, _S]
    x0 = np.array([[1.0, 2.0, 3.0], [-1.0, 1.0, 2.0], [1.0, 0.0, 1.0]])
    return DemoCase(
        index=2,
        title="solution line on a three-node unit-weight cycle",
        sys=LinearSystem.from_rows(H, z),
        signal=GraphSignal.fixed(WeightedDigraph.undirected_cycle(3)),
        x0=x0,
        t_end=40.0,
    )


def _demo_least_squares():
    H = [[-_S, _S], [_S, _S], [-_S, _S], [_S, _S]]
    z = [_S, _S, -_S, -_S]
    x0 = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 1.0], [-1.0, 0.0]])
    return DemoCase(
        index=3,
        title="inconsistent rows on an undirected four-node cycle",
        sys=LinearSystem.from_rows(H, z),
        signal=GraphSignal.fixed(WeightedDigraph.undirected_cycle(4)),
        x0=x0,
        t_end=60.0,
        gains=(1.0, 5.0, 100.0),
    )


def get_demo(index):
    """The packaged case for index 1, 2, or 3."""
    builders = {1: _demo_unique, 2: _demo_underdetermined, 3: _demo_least_squares}
    if index not in builders:
        raise ValueError(f"unknown demo {index!r}; choose one of {DEMO_INDICES}")
    return builders[index]()
