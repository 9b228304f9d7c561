"""Pattern-to-circuit translation for graphs with flow.

With one output per input, the successor chains partition the nodes into
wires. Measuring a node in the flow order consumes its wire edge to the
successor; every other edge still touching an unmeasured node becomes a cz
between the two wires, emitted before the node's own rotation. Measuring at
angle a contributes rz(-a) then h on the node's wire. Edges between two
outputs close the circuit as trailing cz gates.
"""

from __future__ import annotations

import cmath

from .circuits import Gate, GateCircuit
from .flow import Flow
from .graphs import OpenGraph


def wire_map(g: OpenGraph, flow: Flow) -> dict[int, int]:
    """Assign each node the input position whose successor chain it sits on.

    Fails unless the chains use every node exactly once and end on outputs,
    which needs exactly as many outputs as inputs.
    """
    if len(g.inputs) != len(g.outputs):
        raise ValueError("translation needs as many outputs as inputs")
    outputs = set(g.outputs)
    wires: dict[int, int] = {}
    for pos, start in enumerate(g.inputs):
        v = start
        while True:
            if v in wires:
                raise ValueError(f"node {v} lies on two successor chains")
            wires[v] = pos
            if v in outputs:
                break
            if v not in flow.successor:
                raise ValueError(f"chain from input {start} dead-ends at {v}")
            v = flow.successor[v]
    if len(wires) != g.num_nodes:
        missing = sorted(set(range(g.num_nodes)) - set(wires))
        raise ValueError(f"nodes {missing} lie on no successor chain")
    return wires


def _phase_offset(g: OpenGraph, node: int) -> float:
    """Measuring a node prepared in (|0> + e^{i gamma} |1>)/sqrt(2) at angle a
    acts like a plus-state node measured at a - gamma."""
    amps = g.init_states.get(node)
    if amps is None:
        return 0.0
    gamma = cmath.phase(amps[1]) - cmath.phase(amps[0])
    return -gamma

def translate(g: OpenGraph, flow: Flow, angles: dict[int, float]) -> GateCircuit:
    measured = set(g.measured_nodes())
    if set(angles) != measured:
        raise ValueError("angles must cover exactly the measured nodes")
    wires = wire_map(g, flow)
    adj = g.adjacency()
    outputs = set(g.outputs)
    done: set[int] = set()
    gates: list[Gate] = []
    for q in flow.order:
        if q in outputs:
            break
        succ = flow.successor[q]
        for r in sorted(adj[q]):
            if r in done or r == succ:
                continue
            if wires[r] == wires[q]:
                raise ValueError(f"edge ({q},{r}) lies within one wire")
            gates.append(Gate("cz", (wires[q], wires[r]), source=q))
        alpha = angles[q] + _phase_offset(g, q)
        gates.append(Gate("rz", (wires[q],), -alpha, source=q))
        gates.append(Gate("h", (wires[q],), source=q))
        done.add(q)
    for u, v in sorted(g.edges):
        if u in outputs and v in outputs:
            if wires[u] == wires[v]:
                raise ValueError(f"edge ({u},{v}) lies within one wire")
            gates.append(Gate("cz", (wires[u], wires[v]), source=u))
    return GateCircuit(num_wires=len(g.inputs), gates=tuple(gates))
