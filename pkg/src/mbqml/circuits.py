"""Gate-list circuits produced by pattern translation.

Gates act on wires numbered 0..num_wires-1 and are stored in application
order. Each gate remembers the graph node whose measurement produced it, so
compiled circuits stay traceable to the resource state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from . import states

_ONE_QUBIT = {"rz", "rx", "h"}
_TWO_QUBIT = {"cz", "xx"}


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[int, ...]
    angle: float | None = None
    source: int | None = None

    def __post_init__(self):
        if self.kind in _ONE_QUBIT:
            if len(self.wires) != 1:
                raise ValueError(f"{self.kind} acts on one wire")
        elif self.kind in _TWO_QUBIT:
            if len(self.wires) != 2 or self.wires[0] == self.wires[1]:
                raise ValueError(f"{self.kind} acts on two distinct wires")
            object.__setattr__(self, "wires", tuple(sorted(self.wires)))
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        needs_angle = self.kind in ("rz", "rx", "xx")
        if needs_angle and self.angle is None:
            raise ValueError(f"{self.kind} needs an angle")
        if not needs_angle and self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        if self.kind == "rz":
            return states.rz(self.angle)
        if self.kind == "rx":
            return states.rx(self.angle)
        if self.kind == "h":
            return states.H
        if self.kind == "cz":
            return states.CZ
        return states.ising_xx(self.angle)


@dataclass(frozen=True)
class GateCircuit:
    num_wires: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for w in g.wires:
                if not 0 <= w < self.num_wires:
                    raise ValueError(f"gate wire {w} outside 0..{self.num_wires - 1}")

    def unitary(self) -> np.ndarray:
        if self.num_wires > 12:
            raise ValueError("refusing to build a unitary above 12 wires")
        dim = 2**self.num_wires
        u = np.eye(dim, dtype=complex)
        for g in self.gates:
            u = states.apply_unitary(u, g.matrix(), g.wires, self.num_wires)
        return u

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Run the circuit on a state vector of shape (2**num_wires,)."""
        psi = np.asarray(psi, dtype=complex)
        for g in self.gates:
            psi = states.apply_unitary(psi, g.matrix(), g.wires, self.num_wires)
        return psi

    def simplify(self) -> "GateCircuit":
        return simplify(self)

    def to_json(self) -> str:
        return json.dumps(
            {
                "num_wires": self.num_wires,
                "gates": [
                    {"kind": g.kind, "wires": list(g.wires), "angle": g.angle, "source": g.source}
                    for g in self.gates
                ],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "GateCircuit":
        d = json.loads(text)
        gates = tuple(
            Gate(kind=g["kind"], wires=tuple(g["wires"]), angle=g["angle"], source=g.get("source"))
            for g in d["gates"]
        )
        return GateCircuit(num_wires=d["num_wires"], gates=gates)

    def render(self) -> str:
        lines = [f"wires: {self.num_wires}"]
        for g in self.gates:
            where = ",".join(str(w) for w in g.wires)
            part = f"{g.kind}[{where}]"
            if g.angle is not None:
                part += f"({g.angle:+.6f})"
            if g.source is not None:
                part += f"  # node {g.source}"
            lines.append(part)
        return "\n".join(lines)


def _is_unit_run(buf: list[Gate]) -> bool:
    """True when buf is one or more (rz, h) pairs, the shape measurement
    emission always produces on a single wire between entangling gates."""
    if not buf or len(buf) % 2 != 0:
        return False
    for i, g in enumerate(buf):
        want = "rz" if i % 2 == 0 else "h"
        if g.kind != want:
            return False
    return True


def _condense(buf: list[Gate], at_end: bool) -> list[Gate]:
    """Rewrite a (rz, h)^k run into alternating rz/rx rotations.

    Even k needs no hadamard. Odd k keeps one: trailing when an entangling
    gate follows (so it can seed a two-qubit rewrite), leading when the wire
    simply ends.
    """
    if not _is_unit_run(buf):
        return list(buf)
    zs = buf[0::2]
    k = len(zs)
    wire = buf[0].wires
    out: list[Gate] = []
    if k % 2 == 0:
        for i, g in enumerate(zs):
            kind = "rz" if i % 2 == 0 else "rx"
            out.append(Gate(kind, wire, g.angle, g.source))
    elif not at_end:
        for i, g in enumerate(zs):
            kind = "rz" if i % 2 == 0 else "rx"
            out.append(Gate(kind, wire, g.angle, g.source))
        out.append(Gate("h", wire))
    else:
        out.append(Gate("h", wire))
        for i, g in enumerate(zs):
            kind = "rx" if i % 2 == 0 else "rz"
            out.append(Gate(kind, wire, g.angle, g.source))
    return out


def _condense_runs(circ: GateCircuit) -> GateCircuit:
    buf: dict[int, list[Gate]] = {w: [] for w in range(circ.num_wires)}
    out: list[Gate] = []
    for g in circ.gates:
        if g.kind in _ONE_QUBIT:
            buf[g.wires[0]].append(g)
        else:
            for w in g.wires:
                out.extend(_condense(buf[w], at_end=False))
                buf[w] = []
            out.append(g)
    for w in range(circ.num_wires):
        out.extend(_condense(buf[w], at_end=True))
    return replace(circ, gates=tuple(out))


def _try_sandwich(gates: list[Gate], i: int) -> list[Gate] | None:
    """Rewrite h[v] cz[a,b] (rz* rx rz* on the other wire) cz[a,b] h[v] into
    a single xx rotation, letting gates on unrelated wires sit anywhere in
    between. Returns the new gate list or None."""
    first = gates[i]
    if first.kind != "cz":
        return None
    a, b = first.wires
    j = None
    for t in range(i + 1, len(gates)):
        g = gates[t]
        if g.kind == "cz" and g.wires == (a, b):
            j = t
            break
        if g.kind in _TWO_QUBIT and (a in g.wires or b in g.wires):
            return None
    if j is None:
        return None
    middle = gates[i + 1 : j]
    for v, w in ((a, b), (b, a)):
        mid_w = [g for g in middle if g.wires == (w,)]
        if any(g.wires == (v,) for g in middle):
            continue
        rx_pos = [t for t, g in enumerate(mid_w) if g.kind == "rx"]
        if len(rx_pos) != 1:
            continue
        if any(g.kind != "rz" for t, g in enumerate(mid_w) if t != rx_pos[0]):
            continue
        back = None
        for t in range(i - 1, -1, -1):
            if v in gates[t].wires:
                back = t
                break
        if back is None or gates[back].kind != "h":
            continue
        fwd = None
        for t in range(j + 1, len(gates)):
            if v in gates[t].wires:
                fwd = t
                break
        if fwd is None or gates[fwd].kind != "h":
            continue
        rx = mid_w[rx_pos[0]]
        pre = mid_w[: rx_pos[0]]
        post = mid_w[rx_pos[0] + 1 :]
        others = [g for g in middle if g.wires != (w,)]
        segment = others + pre + [Gate("xx", (a, b), rx.angle, rx.source)] + post
        new = list(gates)
        del new[fwd]
        new[i : j + 1] = segment
        del new[back]
        return new
    return None


def simplify(circ: GateCircuit) -> GateCircuit:
    """Condense measurement runs, then fuse cz/rx/cz sandwiches into xx
    rotations until nothing fires. Preserves the overall unitary exactly."""
    cur = _condense_runs(circ)
    gates = list(cur.gates)
    changed = True
    while changed:
        changed = False
        for i in range(len(gates)):
            rewritten = _try_sandwich(gates, i)
            if rewritten is not None:
                gates = rewritten
                changed = True
                break
    return replace(cur, gates=tuple(gates))
