"""OpenGraph construction rules, serialization, and two-coloring."""

import numpy as np
import pytest

from mbqml import states
from mbqml.graphs import OpenGraph, bipartition


def _wire(n):
    return OpenGraph(n, tuple((i, i + 1) for i in range(n - 1)), (0,), (n - 1,))


def test_edges_normalized_and_sorted():
    g = OpenGraph(3, ((2, 1), (1, 0)), (0,), (2,))
    assert g.edges == ((0, 1), (1, 2))


def test_construction_errors():
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 2),), (0,), (1,))  # missing node
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 0),), (0,), (1,))  # self loop
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1), (1, 0)), (0,), (1,))  # duplicate after normalization
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1),), (0, 0), (1,))  # repeated input
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1),), (0,), (5,))  # output off the graph


def test_init_state_rules():
    # measured non-inputs must be phase-balanced; inputs and outputs are free
    OpenGraph(3, ((0, 1), (1, 2)), (0,), (2,), init_states={0: "zero", 1: "T", 2: "zero"})
    with pytest.raises(ValueError):
        OpenGraph(3, ((0, 1), (1, 2)), (0,), (2,), init_states={1: "zero"})
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1),), (0,), (1,), init_states={0: "nope"})
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1),), (0,), (1,), init_states={0: [0.0, 0.0]})
    with pytest.raises(ValueError):
        OpenGraph(2, ((0, 1),), (0,), (1,), init_states={5: "zero"})


def test_init_state_normalization():
    g = OpenGraph(2, ((0, 1),), (0,), (1,), init_states={0: [2.0, 0.0]})
    assert np.allclose(g.init_states[0], states.ZERO)
    g = OpenGraph(2, ((0, 1),), (0,), (1,), init_states={0: "T"})
    assert np.allclose(g.init_states[0], states.T_STATE)


def test_adjacency_and_measured():
    g = _wire(4)
    adj = g.adjacency()
    assert adj[1] == {0, 2}
    assert sum(len(s) for s in adj.values()) == 2 * len(g.edges)
    assert g.measured_nodes() == (0, 1, 2)


def test_json_round_trip():
    rng = np.random.default_rng(21)
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v = v / np.linalg.norm(v)
    g = OpenGraph(4, ((0, 1), (1, 2), (2, 3)), (0, 3), (2, 1), init_states={0: v, 3: "T"})
    h = OpenGraph.from_json(g.to_json())
    assert h.num_nodes == g.num_nodes
    assert h.edges == g.edges
    assert h.inputs == g.inputs and h.outputs == g.outputs
    for k in g.init_states:
        assert abs(abs(np.vdot(g.init_states[k], h.init_states[k])) - 1.0) < 1e-9
    assert h.to_json() == g.to_json()


def test_bipartition_path_and_triangle():
    g = _wire(5)
    parts = bipartition(g)
    assert parts is not None
    p0, p1 = parts
    assert sorted(p0 + p1) == list(range(5))
    edge_set = set(g.edges)
    for u in p0:
        for v in p0:
            assert (min(u, v), max(u, v)) not in edge_set
    tri = OpenGraph(3, ((0, 1), (1, 2), (0, 2)), (0,), (2,))
    assert bipartition(tri) is None


def test_bipartition_disconnected_components():
    g = OpenGraph(4, ((0, 1), (2, 3)), (0, 2), (1, 3))
    parts = bipartition(g)
    assert parts is not None
    assert 0 in parts[0] and 2 in parts[0]
