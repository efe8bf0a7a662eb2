import numpy as np
import pytest

from linflow import (
    GraphSignal,
    NotStronglyConnectedError,
    SignalMode,
    WeightedDigraph,
    arc_integral,
    check_connectivity,
    graph_at,
    is_balanced,
    is_bidirectional,
    is_strongly_connected,
    is_symmetric,
    laplacian,
    left_eigenvector,
)


def split_cycle_signal(mode=SignalMode.PERIODIC):
    gA = WeightedDigraph.from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0)])
    gB = WeightedDigraph.from_arcs(3, [(2, 0, 1.0)])
    return GraphSignal([(1.0, gA), (1.0, gB)], mode)


def test_digraph_validation():
    with pytest.raises(ValueError):
        WeightedDigraph([[0.0, 1.0]])
    with pytest.raises(ValueError):
        WeightedDigraph([[0.0, -1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        WeightedDigraph([[1.0, 0.0], [0.0, 0.0]])
    g = WeightedDigraph([[0.0, 2.0], [1.0, 0.0]])
    assert g.n == 2
    assert g.max_weight() == pytest.approx(2.0)
    assert not g.weights.flags.writeable
    with pytest.raises(ValueError):
        g.weights[0, 1] = 5.0


def test_from_arcs_direction():
    # triple (src, dst, w) lands at weights[dst][src]
    g = WeightedDigraph.from_arcs(3, [(0, 1, 0.5)])
    assert g.weights[1, 0] == pytest.approx(0.5)
    assert g.weights[0, 1] == 0.0
    with pytest.raises(ValueError):
        WeightedDigraph.from_arcs(2, [(0, 0, 1.0)])


def test_standard_graphs():
    cyc = WeightedDigraph.directed_cycle(4)
    assert is_strongly_connected(cyc)
    assert is_balanced(cyc)
    assert not is_bidirectional(cyc)

    ring = WeightedDigraph.undirected_cycle(4)
    assert is_bidirectional(ring)
    assert is_symmetric(ring)
    assert is_balanced(ring)

    full = WeightedDigraph.complete(5)
    assert is_strongly_connected(full)
    assert (full.weights.sum(axis=0) == 4.0).all()


def test_laplacian_structure():
    g = WeightedDigraph([[0.0, 2.0, 0.0], [1.0, 0.0, 3.0], [0.0, 0.5, 0.0]])
    L = laplacian(g)
    assert np.allclose(L.sum(axis=1), 0.0)
    assert np.allclose(np.diag(L), [2.0, 4.0, 0.5])
    assert L[0, 1] == pytest.approx(-2.0)


def test_strong_connectivity_detection():
    assert not is_strongly_connected(WeightedDigraph.from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0)]))
    assert is_strongly_connected(
        WeightedDigraph.from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])
    )
    assert is_strongly_connected(WeightedDigraph(np.zeros((1, 1))))


def test_left_eigenvector_engineered():
    g = WeightedDigraph.from_arcs(3, [(0, 1, 0.5), (1, 2, 1.0 / 3.0), (2, 0, 1.0)])
    w = left_eigenvector(g)
    assert np.allclose(w, [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0], atol=1e-10)
    L = laplacian(g)
    assert np.allclose(w @ L, 0.0, atol=1e-10)


def test_left_eigenvector_uniform_when_balanced():
    w = left_eigenvector(WeightedDigraph.directed_cycle(5))
    assert np.allclose(w, 0.2, atol=1e-10)


def test_left_eigenvector_needs_strong_connectivity():
    with pytest.raises(NotStronglyConnectedError):
        left_eigenvector(WeightedDigraph.from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0)]))


def test_signal_validation():
    g = WeightedDigraph.complete(2)
    with pytest.raises(ValueError):
        GraphSignal([])
    with pytest.raises(ValueError):
        GraphSignal([(0.0, g)])
    with pytest.raises(ValueError):
        GraphSignal([(1.0, g), (1.0, WeightedDigraph.complete(3))])
    with pytest.raises(ValueError):
        GraphSignal([(1.0, g)], a_star=0.5)  # below the max weight
    sig = GraphSignal.fixed(g)
    assert sig.is_fixed
    assert sig.a_star == pytest.approx(1.0)


def test_signal_lookup_right_continuous():
    sig = split_cycle_signal(SignalMode.PERIODIC)
    assert graph_at(sig, 0.0).weights[1, 0] == 1.0
    # at the switch instant the next segment already applies
    assert graph_at(sig, 1.0).weights[0, 2] == 1.0
    assert graph_at(sig, 2.0).weights[1, 0] == 1.0  # wrapped
    assert graph_at(sig, 3.5).weights[0, 2] == 1.0

    hold = split_cycle_signal(SignalMode.HOLD_LAST)
    assert graph_at(hold, 1.0).weights[0, 2] == 1.0
    assert graph_at(hold, 100.0).weights[0, 2] == 1.0  # clamped to last


def test_switch_times():
    sig = split_cycle_signal(SignalMode.PERIODIC)
    assert np.allclose(sig.switch_times(5.0), [1.0, 2.0, 3.0, 4.0, 5.0])
    hold = split_cycle_signal(SignalMode.HOLD_LAST)
    assert np.allclose(hold.switch_times(5.0), [1.0])


def test_pieces_cover_interval():
    sig = split_cycle_signal(SignalMode.PERIODIC)
    pieces = sig.pieces(0.5, 3.2)
    starts = [a for a, b, g in pieces]
    ends = [b for a, b, g in pieces]
    assert starts[0] == pytest.approx(0.5)
    assert ends[-1] == pytest.approx(3.2)
    for k in range(1, len(pieces)):
        assert ends[k - 1] == pytest.approx(starts[k])
    # each piece stays within one segment
    for a, b, g in pieces:
        assert graph_at(sig, a) is g


def test_arc_integral_exact():
    # arc_integral(sig, i, j, ...) integrates the weight of the arc j -> i
    sig = split_cycle_signal(SignalMode.PERIODIC)
    # arc 0 -> 1 lives in segment A only
    assert arc_integral(sig, 1, 0, 0.0, 2.0) == pytest.approx(1.0)
    assert arc_integral(sig, 1, 0, 0.5, 2.5) == pytest.approx(0.5 + 0.5)
    assert arc_integral(sig, 1, 0, 0.25, 0.75) == pytest.approx(0.5)
    # arc 2 -> 0 lives in segment B only
    assert arc_integral(sig, 0, 2, 0.0, 4.0) == pytest.approx(2.0)
    hold = split_cycle_signal(SignalMode.HOLD_LAST)
    assert arc_integral(hold, 0, 2, 0.0, 10.0) == pytest.approx(9.0)
    assert arc_integral(hold, 1, 0, 0.0, 10.0) == pytest.approx(1.0)


def test_connectivity_split_cycle_joint():
    rep = check_connectivity(split_cycle_signal(), window=2.0, delta=0.5, horizon=10.0)
    assert rep.jointly_connected
    assert rep.tail_connected
    assert not rep.bidirectional
    assert not rep.balanced
    assert all(w.connected for w in rep.windows)


def test_connectivity_threshold_too_high():
    rep = check_connectivity(split_cycle_signal(), window=2.0, delta=1.5, horizon=10.0)
    assert not rep.jointly_connected
    bad = [w for w in rep.windows if not w.connected]
    assert bad


def test_connectivity_interior_window_failure():
    # two nodes; the return arc thins out in the second half of each period,
    # so some window starts fail even though the start at 0 passes
    gA = WeightedDigraph.from_arcs(2, [(0, 1, 1.0), (1, 0, 1.0)])
    gB = WeightedDigraph.from_arcs(2, [(0, 1, 1.0)])
    sig = GraphSignal([(1.0, gA), (1.0, gB)], SignalMode.PERIODIC)
    rep = check_connectivity(sig, window=1.5, delta=0.7, horizon=2.0)
    first = rep.windows[0]
    assert first.start == 0.0 and first.connected
    assert not rep.jointly_connected
    starts = [w.start for w in rep.windows if not w.connected]
    assert any(0.0 < s < 1.0 for s in starts)


def test_tail_connectivity_hold_last():
    sig = split_cycle_signal(SignalMode.HOLD_LAST)
    # final graph holds a single arc; the undirected arc graph leaves node 1 out
    rep = check_connectivity(sig, window=2.0, delta=0.5, horizon=6.0)
    assert not rep.tail_connected

    gA = WeightedDigraph.from_arcs(3, [(0, 1, 1.0)])
    ring = WeightedDigraph.undirected_cycle(3)
    sig2 = GraphSignal([(1.0, gA), (1.0, ring)], SignalMode.HOLD_LAST)
    rep2 = check_connectivity(sig2, window=1.0, delta=0.25, horizon=4.0)
    assert rep2.tail_connected


def test_report_to_dict():
    rep = check_connectivity(split_cycle_signal(), window=2.0, delta=0.5, horizon=4.0)
    d = rep.to_dict()
    assert d["jointly_connected"] is True
    assert d["delta"] == pytest.approx(0.5)
    assert isinstance(d["windows"], list) and d["windows"]
    assert set(d["windows"][0]) == {"start", "connected", "arc_count"}
