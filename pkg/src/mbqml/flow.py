"""Causal flow: successor map and measurement order for open graphs.

A flow (f, <) assigns every measured node i a neighbor f(i) outside the
inputs such that i precedes f(i) and every other neighbor of f(i). Outcomes
can then be compensated after the fact, which is what makes measurement
patterns deterministic. The search iterates backward from the outputs: a
node v that is not an input and whose neighborhood contains exactly one
unresolved node u must serve as u's successor.

Success is only guaranteed for |I| = |O| graphs; anything else that happens
to resolve is accepted, and everything else returns None.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import OpenGraph


@dataclass(frozen=True)
class Flow:
    """Successor map, per-node depth (distance from the outputs in correction
    rounds), and one concrete measurement order compatible with both."""

    successor: dict[int, int]
    depth: dict[int, int]
    order: tuple[int, ...]


def find_flow(g: OpenGraph) -> Flow | None:
    adj = g.adjacency()
    outputs = set(g.outputs)
    inputs = set(g.inputs)

    resolved = set(outputs)
    used = set()
    successor: dict[int, int] = {}
    depth = {o: 0 for o in outputs}
    k = 1
    while len(resolved) < g.num_nodes:
        # candidates against the round-start snapshot: keeps every precedence
        # constraint strictly across depth levels
        snapshot = frozenset(resolved)
        proposals = []
        for v in sorted(snapshot - inputs - used):
            candidates = adj[v] - snapshot
            if len(candidates) == 1:
                proposals.append((v, candidates.pop()))
        progress = False
        for v, u in proposals:
            if u in resolved:
                continue  # claimed by an earlier corrector this round
            successor[u] = v
            used.add(v)
            resolved.add(u)
            depth[u] = k
            progress = True
        if not progress:
            return None
        k += 1

    measured = [v for v in range(g.num_nodes) if v not in outputs]
    measured.sort(key=lambda v: (-depth[v], v))
    order = tuple(measured) + tuple(g.outputs)
    return Flow(successor=successor, depth=depth, order=order)


def verify_flow(g: OpenGraph, flow: Flow) -> bool:
    adj = g.adjacency()
    outputs = set(g.outputs)
    inputs = set(g.inputs)
    measured = [v for v in range(g.num_nodes) if v not in outputs]

    if sorted(flow.order) != list(range(g.num_nodes)):
        return False
    pos = {v: i for i, v in enumerate(flow.order)}
    # outputs must come after every measured node
    if measured and outputs and max(pos[v] for v in measured) > min(pos[o] for o in outputs):
        return False

    if sorted(flow.successor) != sorted(measured):
        return False
    targets = list(flow.successor.values())
    if len(set(targets)) != len(targets):
        return False
    for i in measured:
        fi = flow.successor[i]
        if fi in inputs:
            return False
        if fi not in adj[i]:
            return False
        if pos[i] >= pos[fi]:
            return False
        for j in adj[fi] - {i}:
            if pos[i] >= pos[j]:
                return False
    return True
