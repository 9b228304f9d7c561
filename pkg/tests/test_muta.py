"""Layer and network builders: geometry, validation, and composition laws."""

import numpy as np
import pytest

from mbqml import states
from mbqml.flow import find_flow, verify_flow
from mbqml.graphs import bipartition
from mbqml.muta import (
    MutaLayerSpec,
    MutaNetworkSpec,
    build_layer,
    build_network,
    from_classical_geometry,
)
from mbqml.translate import translate


def test_two_wire_layer_geometry():
    m = build_layer(MutaLayerSpec(num_wires=2, tip=0))
    g = m.graph
    assert g.num_nodes == 10
    assert g.inputs == (0, 5)
    assert g.outputs == (4, 9)
    wire_edges = {(r * 5 + c, r * 5 + c + 1) for r in range(2) for c in range(4)}
    assert set(g.edges) == wire_edges | {(1, 5), (1, 7)}
    for r in range(2):
        for c in range(5):
            assert m.node_at(0, r, c) == r * 5 + c
    with pytest.raises(KeyError):
        m.node_at(1, 0, 0)


def test_layer_spec_validation():
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=0)
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=2, columns=4)
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=2, tip=5)
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=2, connected=(1,))  # connected without a tip
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=3, tip=0, connected=(1, 1))
    with pytest.raises(ValueError):
        MutaLayerSpec(num_wires=3, tip=0, connected=(0,))  # tip coupling to itself
    spec = MutaLayerSpec(num_wires=3, tip=1)
    assert spec.connected == (0, 2)


def test_every_layer_has_flow_and_is_bipartite():
    rng = np.random.default_rng(41)
    specs = [MutaLayerSpec(num_wires=1)]
    for _ in range(10):
        n = int(rng.integers(2, 5))
        tip = int(rng.integers(n))
        rows = [r for r in range(n) if r != tip]
        keep = [r for r in rows if rng.random() < 0.7]
        cols = 6 if rng.random() < 0.3 else 5
        specs.append(MutaLayerSpec(num_wires=n, tip=tip, connected=tuple(keep), columns=cols))
    for spec in specs:
        g = build_layer(spec).graph
        fl = find_flow(g)
        assert fl is not None and verify_flow(g, fl)
        assert bipartition(g) is not None


def test_network_join_merges_boundary():
    spec = MutaNetworkSpec.chain([MutaLayerSpec(num_wires=2, tip=0), MutaLayerSpec(num_wires=2)])
    m = build_network(spec)
    g = m.graph
    # two joined rows share their boundary nodes
    assert g.num_nodes == 10 + 10 - 2
    assert g.inputs == (0, 5)
    assert len(g.outputs) == 2
    assert m.node_at(1, 0, 0) == m.node_at(0, 0, 4)
    fl = find_flow(g)
    assert fl is not None and verify_flow(g, fl)
    assert bipartition(g) is not None


def test_single_layer_network_equals_layer():
    spec = MutaNetworkSpec(layers=(MutaLayerSpec(num_wires=2, tip=0),))
    assert build_network(spec).graph.to_json() == build_layer(MutaLayerSpec(2, tip=0)).graph.to_json()


def test_network_spec_validation():
    a, b = MutaLayerSpec(num_wires=2, tip=0), MutaLayerSpec(num_wires=2)
    with pytest.raises(ValueError):
        MutaNetworkSpec(layers=())
    with pytest.raises(ValueError):
        MutaNetworkSpec(layers=(a, b))  # missing join
    with pytest.raises(ValueError):
        MutaNetworkSpec(layers=(a, b), joins=(((0, 0), (0, 1)),))  # output row reused
    with pytest.raises(ValueError):
        MutaNetworkSpec(layers=(a, b), joins=(((0, 1), (1, 1)),))  # input row reused
    with pytest.raises(ValueError):
        MutaNetworkSpec(layers=(a, b), joins=(((0, 7),),))


def test_network_json_round_trip():
    spec = MutaNetworkSpec.chain(
        [MutaLayerSpec(num_wires=3, tip=1), MutaLayerSpec(num_wires=2, tip=0, columns=6)]
    )
    again = MutaNetworkSpec.from_json(spec.to_json())
    assert again == spec
    assert build_network(again).graph.to_json() == build_network(spec).graph.to_json()


def test_from_classical_geometry():
    spec = from_classical_geometry([(2, 0, None), (2, None, None)])
    assert len(spec.layers) == 2
    assert spec.joins == (((0, 0), (1, 1)),)
    with pytest.raises(ValueError):
        from_classical_geometry([])
    with pytest.raises(ValueError):
        from_classical_geometry([(2,)])
    with pytest.raises(ValueError):
        from_classical_geometry([(2, 5, None)])


def _unitary_of(g, angles):
    fl = find_flow(g)
    return translate(g, fl, angles).unitary()


def test_appended_zero_layer_is_identity():
    # a trailing all-zero layer must not change the compiled unitary
    rng = np.random.default_rng(42)
    one = build_layer(MutaLayerSpec(num_wires=2, tip=0)).graph
    angles = {v: rng.uniform(-np.pi, np.pi) for v in one.measured_nodes()}
    u_one = _unitary_of(one, angles)

    spec = MutaNetworkSpec.chain([MutaLayerSpec(num_wires=2, tip=0), MutaLayerSpec(num_wires=2)])
    two = build_network(spec).graph
    ext = {v: angles.get(v, 0.0) for v in two.measured_nodes()}
    u_two = _unitary_of(two, ext)
    assert states.operator_overlap(u_one, u_two) > 1 - 1e-10


def test_disconnected_wire_tensors_identity():
    rng = np.random.default_rng(43)
    two = build_layer(MutaLayerSpec(num_wires=2, tip=0)).graph
    angles2 = {v: rng.uniform(-np.pi, np.pi) for v in two.measured_nodes()}
    u_two = _unitary_of(two, angles2)

    three = build_layer(MutaLayerSpec(num_wires=3, tip=0, connected=(1,))).graph
    angles3 = dict(angles2)
    for v in three.measured_nodes():
        angles3.setdefault(v, 0.0)
    u_three = _unitary_of(three, angles3)
    assert states.operator_overlap(u_three, np.kron(u_two, states.I2)) > 1 - 1e-10
