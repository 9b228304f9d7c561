"""Dynamical Lie algebra of translated circuits.

Pauli strings are coded as X/Z bit-mask pairs, so products and commutators
are bit operations: [A, B] for strings A, B is either zero or +-2 times
another string. Closure elements live in the real coefficient space over all
4^n strings; independence is tracked by incremental Gaussian elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import states
from .circuits import GateCircuit
from .flow import find_flow
from .translate import translate

_RANK_TOL = 1e-9
_MAX_QUBITS = 5
_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True, order=True)
class PauliString:
    """X^x Z^z up to phase, on num_qubits wires (bit 0 = wire 0)."""

    num_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.num_qubits < 1 or self.num_qubits > _MAX_QUBITS:
            raise ValueError(f"supported sizes are 1..{_MAX_QUBITS} qubits")
        if self.x >> self.num_qubits or self.z >> self.num_qubits:
            raise ValueError("mask exceeds qubit count")

    def label(self) -> str:
        return "".join(
            _LETTERS[(self.x >> k & 1, self.z >> k & 1)] for k in range(self.num_qubits)
        )

    @staticmethod
    def from_label(text: str) -> "PauliString":
        x = z = 0
        for k, ch in enumerate(text):
            try:
                xb, zb = next(b for b, l in _LETTERS.items() if l == ch)
            except StopIteration:
                raise ValueError(f"unknown Pauli letter {ch!r}") from None
            x |= xb << k
            z |= zb << k
        return PauliString(len(text), x, z)

    def index(self) -> int:
        return (self.x << self.num_qubits) | self.z


def commutator(p: PauliString, q: PauliString) -> tuple[float, PauliString] | None:
    """[P, Q] = c R for strings, or None when they commute."""
    s1 = bin(p.z & q.x).count("1") & 1
    s2 = bin(q.z & p.x).count("1") & 1
    if s1 == s2:
        return None
    coeff = 2.0 if s1 == 0 else -2.0
    return coeff, PauliString(p.num_qubits, p.x ^ q.x, p.z ^ q.z)


@dataclass(frozen=True)
class LieClosureResult:
    num_qubits: int
    basis: tuple[dict[PauliString, float], ...]
    dim: int

    @property
    def is_full(self) -> bool:
        return self.dim == 4**self.num_qubits - 1

    def labels(self) -> tuple[str, ...]:
        out = []
        for el in self.basis:
            main = max(el, key=lambda s: abs(el[s]))
            out.append(main.label())
        return tuple(out)


class _SpanTracker:
    """Row reduction over the 4^n real coefficient space."""

    def __init__(self, num_qubits: int):
        self.dim_space = 4**num_qubits
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    def add(self, vec: np.ndarray) -> bool:
        v = vec.astype(float).copy()
        for piv, row in zip(self.pivots, self.rows):
            v -= v[piv] * row
        norm = np.max(np.abs(v))
        if norm <= _RANK_TOL:
            return False
        piv = int(np.argmax(np.abs(v)))
        v /= v[piv]
        self.rows.append(v)
        self.pivots.append(piv)
        return True


def _as_element(gen) -> dict[PauliString, float]:
    if isinstance(gen, PauliString):
        return {gen: 1.0}
    return {p: float(c) for p, c in dict(gen).items()}


def _bracket(a: dict, b: dict) -> dict[PauliString, float]:
    out: dict[PauliString, float] = {}
    for p, cp in a.items():
        for q, cq in b.items():
            r = commutator(p, q)
            if r is None:
                continue
            coeff, s = r
            out[s] = out.get(s, 0.0) + cp * cq * coeff
    return {s: c for s, c in out.items() if abs(c) > _RANK_TOL}


def lie_closure(generators) -> LieClosureResult:
    """Real span of the repeated-commutator closure of the generators."""
    gens = [_as_element(g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    n = next(iter(gens[0])).num_qubits
    tracker = _SpanTracker(n)
    basis: list[dict[PauliString, float]] = []

    def vec_of(el):
        v = np.zeros(tracker.dim_space)
        for p, c in el.items():
            v[p.index()] = c
        return v

    def try_add(el):
        if el and tracker.add(vec_of(el)):
            basis.append(el)
            return True
        return False

    for g in gens:
        try_add(g)
    frontier = list(range(len(basis)))
    while frontier:
        new_frontier = []
        for i in frontier:
            for j in range(len(basis)):
                if try_add(_bracket(basis[i], basis[j])):
                    new_frontier.append(len(basis) - 1)
        frontier = new_frontier
    return LieClosureResult(n, tuple(basis), len(basis))


def _conjugate_mask(p: PauliString, gate) -> PauliString:
    x, z = p.x, p.z
    if gate.kind == "h":
        w = 1 << gate.wires[0]
        xw, zw = x & w, z & w
        x = (x & ~w) | (w if zw else 0)
        z = (z & ~w) | (w if xw else 0)
    elif gate.kind == "cz":
        a, b = (1 << gate.wires[0]), (1 << gate.wires[1])
        if x & a:
            z ^= b
        if x & b:
            z ^= a
    return PauliString(p.num_qubits, x, z)


def extract_generators(circuit: GateCircuit) -> set[PauliString]:
    """One Pauli direction per rotation gate, pushed through every later
    angle-free Clifford so the set generates the circuit's algebra. Signs are
    dropped; they never change the span."""
    n = circuit.num_wires
    out: set[PauliString] = set()
    for i, gate in enumerate(circuit.gates):
        if gate.kind == "rz":
            p = PauliString(n, 0, 1 << gate.wires[0])
        elif gate.kind == "rx":
            p = PauliString(n, 1 << gate.wires[0], 0)
        elif gate.kind == "xx":
            p = PauliString(n, (1 << gate.wires[0]) | (1 << gate.wires[1]), 0)
        else:
            continue
        for later in circuit.gates[i + 1 :]:
            if later.kind in ("h", "cz"):
                p = _conjugate_mask(p, later)
        out.add(p)
    return out


def variance_probe(
    g,
    target: states.StateVector | None,
    num_samples: int,
    rng: np.random.Generator,
) -> dict:
    """Sample uniform angle patterns, measure the spread of the infidelity
    against a fixed Haar target from |0..0>, and report it next to the
    2^n / dim concentration bound (claimed only for the full algebra)."""
    fl = find_flow(g)
    if fl is None:
        raise ValueError("graph has no flow")
    measured = g.measured_nodes()
    zeros = {v: 0.0 for v in measured}
    base = translate(g, fl, zeros).simplify()
    gens = extract_generators(base)
    closure = lie_closure(gens) if gens else None
    n = base.num_wires
    if target is None:
        target = states.haar_state(n, rng)
    start = np.zeros(2**n, dtype=complex)
    start[0] = 1.0
    losses = np.empty(num_samples)
    for k in range(num_samples):
        draw = rng.uniform(-np.pi, np.pi, size=len(measured))
        angles = dict(zip(measured, draw))
        psi = translate(g, fl, angles).apply(start)
        losses[k] = 1.0 - np.abs(np.vdot(target.amplitudes, psi)) ** 2
    var = float(np.var(losses, ddof=1))
    report = {
        "generators": sorted(p.label() for p in gens),
        "dim": closure.dim if closure else 0,
        "is_full": bool(closure.is_full) if closure else False,
        "bound": (2**n / closure.dim) if closure and closure.is_full else None,
        "empirical_variance": var,
        "samples": int(num_samples),
    }
    return report
