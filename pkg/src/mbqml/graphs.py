"""Open graphs: the undirected resource graph plus ordered input/output sets.

Nodes are dense integers 0..n-1. Initialization states other than |+> are
recorded per node; measured non-input nodes may only carry phase-balanced
states (|0>-style injections are restricted to inputs).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .states import PLUS, T_STATE, ZERO

_NAMED_STATES = {"plus": PLUS, "zero": ZERO, "T": T_STATE}


def _as_state(value) -> np.ndarray:
    if isinstance(value, str):
        try:
            return _NAMED_STATES[value].copy()
        except KeyError:
            raise ValueError(f"unknown init state name {value!r}") from None
    v = np.asarray(value, dtype=complex)
    if v.shape != (2,):
        raise ValueError("init states must be single-qubit")
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise ValueError("init state has zero norm")
    return v / n


@dataclass(frozen=True)
class OpenGraph:
    """Resource graph with ordered inputs/outputs and optional init states."""

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    init_states: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        norm_edges = []
        for u, v in self.edges:
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise ValueError(f"edge ({u},{v}) references a missing node")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm_edges.append(e)
        object.__setattr__(self, "edges", tuple(sorted(norm_edges)))
        for name, nodes in (("inputs", self.inputs), ("outputs", self.outputs)):
            if len(set(nodes)) != len(nodes):
                raise ValueError(f"{name} contain a repeated node")
            for v in nodes:
                if not 0 <= v < self.num_nodes:
                    raise ValueError(f"{name} reference missing node {v}")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        states = {int(k): _as_state(v) for k, v in self.init_states.items()}
        for v, st in states.items():
            if not 0 <= v < self.num_nodes:
                raise ValueError(f"init state on missing node {v}")
            measured = v not in self.outputs
            if measured and v not in self.inputs:
                if abs(abs(st[0]) - abs(st[1])) > 1e-10:
                    raise ValueError(
                        f"node {v} is measured but its init state is not phase-balanced"
                    )
        object.__setattr__(self, "init_states", states)

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.num_nodes)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def measured_nodes(self) -> tuple[int, ...]:
        out = set(self.outputs)
        return tuple(v for v in range(self.num_nodes) if v not in out)

    def to_json(self) -> str:
        init = {}
        for v, st in sorted(self.init_states.items()):
            for name, ref in _NAMED_STATES.items():
                if abs(abs(np.vdot(ref, st)) - 1.0) < 1e-12:
                    init[str(v)] = name
                    break
            else:
                init[str(v)] = [st[0].real, st[0].imag, st[1].real, st[1].imag]
        return json.dumps(
            {
                "nodes": self.num_nodes,
                "edges": [list(e) for e in self.edges],
                "inputs": list(self.inputs),
                "outputs": list(self.outputs),
                "init": init,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "OpenGraph":
        d = json.loads(text)
        init = {}
        for k, v in d.get("init", {}).items():
            if isinstance(v, str):
                init[int(k)] = v
            else:
                init[int(k)] = np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])
        return OpenGraph(
            num_nodes=d["nodes"],
            edges=tuple((u, v) for u, v in d["edges"]),
            inputs=tuple(d["inputs"]),
            outputs=tuple(d["outputs"]),
            init_states=init,
        )


def bipartition(g: OpenGraph) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Two-color the graph; None if an odd cycle makes that impossible.

    The first part contains node 0's color class (and the lowest-indexed node
    of every other connected component).
    """
    color: dict[int, int] = {}
    adj = g.adjacency()
    for start in range(g.num_nodes):
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for w in sorted(adj[v]):
                if w not in color:
                    color[w] = 1 - color[v]
                    stack.append(w)
                elif color[w] == color[v]:
                    return None
    part0 = tuple(v for v in range(g.num_nodes) if color[v] == 0)
    part1 = tuple(v for v in range(g.num_nodes) if color[v] == 1)
    return part0, part1
