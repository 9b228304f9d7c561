"""Triangle-network resource states.

A layer is n horizontal wires of 5 columns (optionally 6). Wire row i may be
designated the tip row: its column-1 node connects to the column-0 and
column-2 nodes of every row in the connected set, forming one triangle per
connection. The column-1 node of a connected row is the triangle's base
center; measuring it away from {0, pi} is what entangles the two wires.

Networks concatenate layers by identifying chosen outputs of layer l with
chosen inputs of layer l+1. Merged nodes keep the earlier layer's index; all
other nodes are numbered sequentially in (layer, row, column) order, so a
single layer (2, tip 0) reproduces the canonical indexing with wire 0 on
nodes 0-4 and wire 1 on nodes 5-9.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graphs import OpenGraph


@dataclass(frozen=True)
class MutaLayerSpec:
    """One layer: (num_wires) disconnected, or (num_wires, tip) with the tip
    row coupled to every row in ``connected`` (default: all other rows)."""

    num_wires: int
    tip: int | None = None
    connected: tuple[int, ...] | None = None
    columns: int = 5

    def __post_init__(self):
        if self.num_wires < 1:
            raise ValueError("a layer needs at least one wire")
        if self.columns not in (5, 6):
            raise ValueError("layers have 5 columns (6 as the deep variant)")
        if self.tip is None:
            if self.connected:
                raise ValueError("connected rows require a tip row")
            object.__setattr__(self, "connected", ())
            return
        if not 0 <= self.tip < self.num_wires:
            raise ValueError(f"tip row {self.tip} out of range")
        if self.connected is None:
            conn = tuple(r for r in range(self.num_wires) if r != self.tip)
        else:
            conn = tuple(self.connected)
        if len(set(conn)) != len(conn):
            raise ValueError("connected rows repeat")
        for r in conn:
            if not 0 <= r < self.num_wires:
                raise ValueError(f"connected row {r} out of range")
            if r == self.tip:
                raise ValueError("tip row cannot connect to itself")
        object.__setattr__(self, "connected", conn)


@dataclass(frozen=True)
class MutaGraph:
    """A built resource graph plus its geometric bookkeeping.

    coords maps every node to its primary (layer, row, column); merged
    boundary nodes additionally appear in aliases under the later layer's
    coordinate.
    """

    graph: OpenGraph
    coords: dict[int, tuple[int, int, int]]
    aliases: dict[int, tuple[int, int, int]] = field(default_factory=dict)

    def node_at(self, layer: int, row: int, col: int) -> int:
        for v, c in self.coords.items():
            if c == (layer, row, col):
                return v
        for v, c in self.aliases.items():
            if c == (layer, row, col):
                return v
        raise KeyError((layer, row, col))


def build_layer(spec: MutaLayerSpec) -> MutaGraph:
    cols = spec.columns
    n = spec.num_wires

    def node(row: int, col: int) -> int:
        return row * cols + col

    edges = []
    for r in range(n):
        for c in range(cols - 1):
            edges.append((node(r, c), node(r, c + 1)))
    if spec.tip is not None:
        tip = node(spec.tip, 1)
        for r in spec.connected:
            edges.append((tip, node(r, 0)))
            edges.append((tip, node(r, 2)))

    g = OpenGraph(
        num_nodes=n * cols,
        edges=tuple(edges),
        inputs=tuple(node(r, 0) for r in range(n)),
        outputs=tuple(node(r, cols - 1) for r in range(n)),
    )
    coords = {node(r, c): (0, r, c) for r in range(n) for c in range(cols)}
    return MutaGraph(graph=g, coords=coords)


@dataclass(frozen=True)
class MutaNetworkSpec:
    """Layers plus one join per adjacent pair: (output row of l, input row of
    l+1) pairs, injective on both sides. Unjoined outputs and inputs become
    global outputs and inputs."""

    layers: tuple[MutaLayerSpec, ...]
    joins: tuple[tuple[tuple[int, int], ...], ...] = ()

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        object.__setattr__(self, "layers", tuple(self.layers))
        joins = tuple(tuple(tuple(p) for p in j) for j in self.joins)
        if len(joins) != len(self.layers) - 1:
            raise ValueError("need exactly one join per adjacent layer pair")
        for idx, join in enumerate(joins):
            left, right = self.layers[idx], self.layers[idx + 1]
            outs = [p[0] for p in join]
            ins = [p[1] for p in join]
            if len(set(outs)) != len(outs):
                raise ValueError(f"join {idx} reuses an output row")
            if len(set(ins)) != len(ins):
                raise ValueError(f"join {idx} identifies two outputs with one input")
            for o, i in join:
                if not 0 <= o < left.num_wires:
                    raise ValueError(f"join {idx}: output row {o} out of range")
                if not 0 <= i < right.num_wires:
                    raise ValueError(f"join {idx}: input row {i} out of range")
        object.__setattr__(self, "joins", joins)

    @staticmethod
    def chain(layers: list[MutaLayerSpec]) -> "MutaNetworkSpec":
        """Full row-to-row joins on the shared width of each adjacent pair."""
        joins = []
        for a, b in zip(layers, layers[1:]):
            k = min(a.num_wires, b.num_wires)
            joins.append(tuple((r, r) for r in range(k)))
        return MutaNetworkSpec(layers=tuple(layers), joins=tuple(joins))

    def to_json(self) -> str:
        return json.dumps(
            {
                "layers": [
                    {
                        "wires": l.num_wires,
                        "tip": l.tip,
                        "connected": list(l.connected),
                        "columns": l.columns,
                    }
                    for l in self.layers
                ],
                "joins": [[list(p) for p in j] for j in self.joins],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "MutaNetworkSpec":
        d = json.loads(text)
        layers = tuple(
            MutaLayerSpec(
                num_wires=l["wires"],
                tip=l["tip"],
                connected=tuple(l["connected"]) if l["tip"] is not None else None,
                columns=l.get("columns", 5),
            )
            for l in d["layers"]
        )
        joins = tuple(tuple((p[0], p[1]) for p in j) for j in d["joins"])
        return MutaNetworkSpec(layers=layers, joins=joins)


def build_network(spec: MutaNetworkSpec) -> MutaGraph:
    coords: dict[int, tuple[int, int, int]] = {}
    aliases: dict[int, tuple[int, int, int]] = {}
    edges: list[tuple[int, int]] = []
    global_inputs: list[int] = []
    global_outputs: list[int] = []
    next_id = 0
    prev_out_by_row: dict[int, int] = {}

    for l, layer in enumerate(spec.layers):
        cols = layer.columns
        join = dict((i, o) for o, i in spec.joins[l - 1]) if l > 0 else {}
        local: dict[tuple[int, int], int] = {}
        for r in range(layer.num_wires):
            for c in range(cols):
                if c == 0 and r in join:
                    v = prev_out_by_row[join[r]]
                    aliases[v] = (l, r, c)
                else:
                    v = next_id
                    next_id += 1
                    coords[v] = (l, r, c)
                local[(r, c)] = v
        for r in range(layer.num_wires):
            for c in range(cols - 1):
                edges.append((local[(r, c)], local[(r, c + 1)]))
        if layer.tip is not None:
            tip = local[(layer.tip, 1)]
            for r in layer.connected:
                edges.append((tip, local[(r, 0)]))
                edges.append((tip, local[(r, 2)]))
        for r in range(layer.num_wires):
            if not (r in join):
                global_inputs.append(local[(r, 0)])
        joined_out = set(o for o, _ in spec.joins[l]) if l < len(spec.layers) - 1 else set()
        for r in range(layer.num_wires):
            if r not in joined_out:
                global_outputs.append(local[(r, cols - 1)])
        prev_out_by_row = {r: local[(r, cols - 1)] for r in range(layer.num_wires)}

    g = OpenGraph(
        num_nodes=next_id,
        edges=tuple(edges),
        inputs=tuple(global_inputs),
        outputs=tuple(global_outputs),
    )
    return MutaGraph(graph=g, coords=coords, aliases=aliases)


def from_classical_geometry(nn_layers: list[tuple[int, int | None, tuple[int, ...] | None]]) -> MutaNetworkSpec:
    """Mirror a feed-forward stack: one (width, tip, connections) triple per
    classical layer becomes one resource layer with the same connectivity,
    chained row-to-row."""
    if not nn_layers:
        raise ValueError("empty network geometry")
    layers = []
    for entry in nn_layers:
        try:
            width, tip, connected = entry
        except (TypeError, ValueError):
            raise ValueError(f"not a (width, tip, connections) triple: {entry!r}") from None
        try:
            layers.append(MutaLayerSpec(num_wires=width, tip=tip, connected=connected))
        except ValueError as exc:
            raise ValueError(f"not feed-forward connectivity: {exc}") from None
    return MutaNetworkSpec.chain(layers)
