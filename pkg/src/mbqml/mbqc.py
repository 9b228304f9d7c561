"""Measurement-pattern simulation on a lazy frontier.

Qubits enter the simulated register the first time a measurement needs them
and leave as soon as they are measured, so memory tracks the cut width of the
measurement schedule rather than the graph size. An edge is applied exactly
once, when its second endpoint activates; measuring a node first activates
all its neighbours, which guarantees every incident edge has been applied.

Three drivers share the frontier:

- run_ideal: follows one outcome branch (all zeros unless selected) on a
  state vector, with corrections folded into later measurement angles.
- run_branches: walks every outcome branch depth-first, reusing shared
  prefixes, and applies the final byproduct flips so branches agree.
- run_density: evolves a density matrix and merges each measurement's two
  branches through literal correction operators, one pass regardless of how
  many outcomes exist. Noise channels slot in per node just before its
  measurement, and on outputs at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import states
from .flow import Flow, find_flow
from .graphs import OpenGraph

_PRUNE = 1e-12


@dataclass(frozen=True)
class Measurement:
    """One node's measurement: xy basis at an angle, or computational z.

    controls lists earlier nodes whose recorded outcomes gate the angle:
    the node measures at the stated angle when every control read 1 and
    at zero otherwise.
    """

    basis: str = "xy"
    angle: float = 0.0
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        if self.basis not in ("xy", "z"):
            raise ValueError(f"unknown measurement basis {self.basis!r}")
        object.__setattr__(self, "controls", tuple(self.controls))


@dataclass(frozen=True)
class BranchResult:
    outcomes: tuple[int, ...]
    probability: float
    state: states.StateVector


def normalize_measurements(g: OpenGraph, angles) -> dict[int, Measurement]:
    out = {}
    for v, m in angles.items():
        out[v] = m if isinstance(m, Measurement) else Measurement(angle=float(m))
    if set(out) != set(g.measured_nodes()):
        raise ValueError("measurements must cover exactly the measured nodes")
    return out


def validate_schedule(
    g: OpenGraph,
    measurements: dict[int, Measurement],
    successor: dict[int, int],
    schedule: tuple[int, ...],
) -> None:
    """Reject schedules whose corrections would land on a spent qubit."""
    measured = set(g.measured_nodes())
    if set(schedule) != measured or len(schedule) != len(measured):
        raise ValueError("schedule must list each measured node exactly once")
    pos = {v: i for i, v in enumerate(schedule)}
    adj = g.adjacency()
    inputs = set(g.inputs)
    targets = list(successor.values())
    if len(set(targets)) != len(targets):
        raise ValueError("two nodes share a correction target")
    for v, w in successor.items():
        if v not in measured:
            raise ValueError(f"successor source {v} is not measured")
        if w in inputs:
            raise ValueError(f"correction target {w} is an input")
        if w not in adj[v]:
            raise ValueError(f"correction target {w} is not adjacent to {v}")
        if w in pos and pos[w] <= pos[v]:
            raise ValueError(f"{w} is measured before its dependency {v}")
        for u in adj[w] - {v}:
            if u in pos and pos[u] <= pos[v]:
                raise ValueError(f"{u} is measured before its dependency {v}")
    for v, m in measurements.items():
        for c in m.controls:
            if c not in pos:
                raise ValueError(f"control {c} of node {v} is never measured")
            if pos[c] >= pos[v]:
                raise ValueError(f"control {c} measured after node {v}")


def _resolve(g, measurements, flow, successor, schedule):
    if successor is None:
        fl = flow if flow is not None else find_flow(g)
        if fl is None:
            raise ValueError("graph has no flow; pass successor and schedule explicitly")
        successor = dict(fl.successor)
        if schedule is None:
            outs = set(g.outputs)
            schedule = tuple(v for v in fl.order if v not in outs)
    elif schedule is None:
        raise ValueError("a custom successor map needs an explicit schedule")
    schedule = tuple(schedule)
    validate_schedule(g, measurements, successor, schedule)
    return successor, schedule


class _Frontier:
    """Shared activation bookkeeping for the pure and density engines."""

    def __init__(self, g: OpenGraph, input_state: states.StateVector | None):
        self.g = g
        self.adj = g.adjacency()
        self.inputs = set(g.inputs)
        self.measured = set(g.measured_nodes())
        self.axis: dict[int, int] = {}
        self.done: set[int] = set()
        self.k = 0
        free = [v for v in g.inputs if v not in g.init_states]
        if input_state is not None:
            if input_state.num_qubits != len(free):
                raise ValueError(
                    f"input state covers {input_state.num_qubits} qubits, "
                    f"graph has {len(free)} inputs without declared states"
                )
            if free:
                self._activate_block(free, input_state.amplitudes)

    def init_vector(self, v: int) -> np.ndarray:
        amps = self.g.init_states.get(v)
        if amps is not None:
            return np.array(amps, dtype=complex)
        return states.PLUS.copy()

    def measured_init_vector(self, v: int) -> np.ndarray:
        # Balanced preparations on measured non-inputs are realized as angle
        # offsets, not literal states, so outcome corrections stay exact.
        if v in self.g.init_states and v not in self.inputs:
            return states.PLUS.copy()
        return self.init_vector(v)

    def phase_offset(self, v: int) -> float:
        amps = self.g.init_states.get(v)
        if amps is None or v in self.inputs:
            return 0.0
        return -(np.angle(amps[1]) - np.angle(amps[0]))

    def ensure_active(self, v: int):
        # A measured node's edges were all applied before it was projected
        # out, so a consumed neighbor needs (and gets) nothing here.
        if v in self.axis or v in self.done:
            return
        self._append(v)
        for u in sorted(self.adj[v]):
            if u in self.axis and u != v:
                self._two_qubit(states.CZ, self.axis[v], self.axis[u])

    def _append(self, v: int):
        vec = self.measured_init_vector(v) if v in self.measured else self.init_vector(v)
        self._extend(vec)
        self.axis[v] = self.k
        self.k += 1

    def _activate_block(self, nodes: list[int], amplitudes: np.ndarray):
        self._extend(amplitudes)
        for v in nodes:
            self.axis[v] = self.k
            self.k += 1
        node_set = set(nodes)
        for u, w in sorted(self.g.edges):
            if u in node_set and w in node_set:
                self._two_qubit(states.CZ, self.axis[u], self.axis[w])

    def drop_axis(self, v: int):
        a = self.axis.pop(v)
        self.done.add(v)
        for u in self.axis:
            if self.axis[u] > a:
                self.axis[u] -= 1
        self.k -= 1
        return a

    def _extend(self, vec):
        raise NotImplementedError

    def _two_qubit(self, u, a, b):
        raise NotImplementedError


def _contract_left(mat: np.ndarray, k: int, axis: int, vec: np.ndarray) -> np.ndarray:
    cols = mat.shape[1] if mat.ndim == 2 else 1
    t = mat.reshape(2**axis, 2, -1)
    c = vec.conj()
    return (c[0] * t[:, 0, :] + c[1] * t[:, 1, :]).reshape(2 ** (k - 1), cols)


class _PureFrontier(_Frontier):
    def __init__(self, g, input_state):
        self.psi = np.ones(1, dtype=complex)
        super().__init__(g, input_state)

    def _extend(self, vec):
        vec = np.asarray(vec, dtype=complex)
        self.psi = (self.psi[:, None] * vec[None, :]).reshape(-1)

    def _two_qubit(self, u, a, b):
        if u is states.CZ:
            # Diagonal gate: flip the |11> block sign in place (the reshape
            # must be a view, so keep psi contiguous).
            if not self.psi.flags.c_contiguous:
                self.psi = np.ascontiguousarray(self.psi)
            lo, hi = (a, b) if a < b else (b, a)
            t = self.psi.reshape(2**lo, 2, 2 ** (hi - lo - 1), 2, -1)
            t[:, 1, :, 1, :] *= -1
            return
        self.psi = states.apply_unitary(self.psi, u, (a, b), self.k)

    def one_qubit(self, u, a):
        self.psi = states.apply_unitary(self.psi, u, (a,), self.k)

    def project(self, v: int, vec: np.ndarray) -> float:
        """Project node v onto vec, drop its qubit, return the branch weight."""
        a = self.axis[v]
        self.psi = _contract_left(self.psi.reshape(-1, 1), self.k, a, vec).reshape(-1)
        self.drop_axis(v)
        p = float(np.real(np.vdot(self.psi, self.psi)))
        if p > _PRUNE:
            self.psi = self.psi / np.sqrt(p)
        return p

    def snapshot(self):
        return (self.psi.copy(), dict(self.axis), set(self.done), self.k)

    def restore(self, snap):
        self.psi = snap[0].copy()
        self.axis = dict(snap[1])
        self.done = set(snap[2])
        self.k = snap[3]


class _DensityFrontier(_Frontier):
    def __init__(self, g, input_state):
        self.rho = np.ones((1, 1), dtype=complex)
        super().__init__(g, input_state)

    def _extend(self, vec):
        vec = np.asarray(vec, dtype=complex)
        self.rho = np.kron(self.rho, np.outer(vec, vec.conj()))

    def _two_qubit(self, u, a, b):
        self.rho = states.apply_unitary_rho(self.rho, u, (a, b), self.k)

    def one_qubit(self, u, a):
        self.rho = states.apply_unitary_rho(self.rho, u, (a,), self.k)

    def kraus(self, ops, a):
        self.rho = states.apply_kraus(self.rho, ops, (a,), self.k)

    def branch(self, v: int, vec: np.ndarray) -> np.ndarray:
        """The (unnormalized) post-measurement matrix for one branch of v."""
        a = self.axis[v]
        half = _contract_left(self.rho, self.k, a, vec)
        return _contract_left(half.conj().T, self.k, a, vec).conj().T


def _signal_angle(m: Measurement, offset: float, sx: int, sz: int, bits: dict[int, int]) -> float:
    base = m.angle
    if m.controls and not all(bits[c] for c in m.controls):
        base = 0.0
    base += offset
    return (-1.0) ** sx * base + sz * np.pi


def _finalize_pure(fr: _PureFrontier, sx, sz, apply_byproduct: bool) -> states.StateVector:
    g = fr.g
    for o in g.outputs:
        fr.ensure_active(o)
    if apply_byproduct:
        for o in g.outputs:
            if sz.get(o, 0):
                fr.one_qubit(states.Z, fr.axis[o])
            if sx.get(o, 0):
                fr.one_qubit(states.X, fr.axis[o])
    order = [fr.axis[o] for o in g.outputs]
    t = fr.psi.reshape([2] * fr.k)
    t = np.moveaxis(t, order, list(range(len(order))))
    amps = t.reshape(-1)
    return states.StateVector(len(g.outputs), amps / np.sqrt(np.real(np.vdot(amps, amps))))


def _run_pure(g, measurements, successor, schedule, input_state, select, enumerate_all):
    adj = g.adjacency()
    fr = _PureFrontier(g, input_state)
    sx: dict[int, int] = {}
    sz: dict[int, int] = {}
    bits: dict[int, int] = {}
    results: list[BranchResult] = []

    def record(v, recorded):
        bits[v] = recorded
        if recorded and v in successor:
            w = successor[v]
            sx[w] = sx.get(w, 0) ^ 1
            for u in adj[w] - {v}:
                sz[u] = sz.get(u, 0) ^ 1

    def step(i, prob):
        if i == len(schedule):
            if enumerate_all:
                state = _finalize_pure(fr, sx, sz, apply_byproduct=True)
                results.append(BranchResult(tuple(bits[v] for v in schedule), prob, state))
                return None
            return prob
        v = schedule[i]
        m = measurements[v]
        fr.ensure_active(v)
        for u in sorted(adj[v]):
            fr.ensure_active(u)
        if enumerate_all and v not in select:
            branches = (0, 1)
        else:
            branches = (select.get(v, 0),)
        out = None
        for recorded in branches:
            snap = fr.snapshot() if enumerate_all else None
            saved = (dict(sx), dict(sz), dict(bits)) if enumerate_all else None
            if m.basis == "z":
                raw = recorded ^ sx.get(v, 0)
                vec = states.ZERO if raw == 0 else states.ONE
            else:
                alpha = _signal_angle(m, fr.phase_offset(v), sx.get(v, 0), sz.get(v, 0), bits)
                vec = states.xy_eigenstate(alpha, recorded)
            p = fr.project(v, vec)
            if p <= _PRUNE:
                if not enumerate_all:
                    return 0.0
            else:
                record(v, recorded)
                out = step(i + 1, prob * p)
            if enumerate_all:
                fr.restore(snap)
                sx.clear(), sx.update(saved[0])
                sz.clear(), sz.update(saved[1])
                bits.clear(), bits.update(saved[2])
        return out

    final = step(0, 1.0)
    if enumerate_all:
        return results
    if final is None or final <= _PRUNE:
        return None, 0.0
    return _finalize_pure(fr, sx, sz, apply_byproduct=True), final


def run_ideal(
    g: OpenGraph,
    angles,
    *,
    flow: Flow | None = None,
    successor: dict[int, int] | None = None,
    schedule: tuple[int, ...] | None = None,
    select: dict[int, int] | None = None,
    input_state: states.StateVector | None = None,
) -> tuple[states.StateVector | None, float]:
    """Follow one outcome branch and return (output state, branch weight).

    The branch is all-zeros except where select forces a recorded outcome.
    """
    measurements = normalize_measurements(g, angles)
    successor, schedule = _resolve(g, measurements, flow, successor, schedule)
    return _run_pure(g, measurements, successor, schedule, input_state, select or {}, False)


def run_branches(
    g: OpenGraph,
    angles,
    *,
    flow: Flow | None = None,
    successor: dict[int, int] | None = None,
    schedule: tuple[int, ...] | None = None,
    input_state: states.StateVector | None = None,
    select: dict[int, int] | None = None,
) -> list[BranchResult]:
    """Enumerate every outcome branch, skipping nodes pinned by select."""
    measurements = normalize_measurements(g, angles)
    successor, schedule = _resolve(g, measurements, flow, successor, schedule)
    select = select or {}
    if sum(1 for v in schedule if v not in select) > 16:
        raise ValueError("refusing to enumerate more than 2^16 branches")
    return _run_pure(g, measurements, successor, schedule, input_state, select, True)


def run_density(
    g: OpenGraph,
    angles,
    *,
    flow: Flow | None = None,
    successor: dict[int, int] | None = None,
    schedule: tuple[int, ...] | None = None,
    input_state: states.StateVector | None = None,
    noise=None,
) -> states.DensityMatrix:
    """Evolve the full mixture: every measurement's branches are merged after
    the literal correction, so cost does not grow with outcome count. Density
    mode keeps no outcome record, so computational-basis labels would be
    averaged away; it rejects them instead."""
    measurements = normalize_measurements(g, angles)
    for v, m in measurements.items():
        if m.basis != "xy":
            raise ValueError("density mode only merges xy branches")
        if m.controls:
            raise ValueError("density mode cannot gate angles on outcomes")
    successor, schedule = _resolve(g, measurements, flow, successor, schedule)
    adj = g.adjacency()
    fr = _DensityFrontier(g, input_state)
    for v in schedule:
        m = measurements[v]
        fr.ensure_active(v)
        for u in sorted(adj[v]):
            fr.ensure_active(u)
        targets: list[tuple[str, int]] = []
        if v in successor:
            w = successor[v]
            fr.ensure_active(w)
            targets.append(("x", w))
            for u in sorted(adj[w] - {v}):
                fr.ensure_active(u)
                targets.append(("z", u))
        if noise is not None:
            ops = noise.kraus_for(v)
            if ops is not None:
                fr.kraus(ops, fr.axis[v])
        alpha = m.angle + fr.phase_offset(v)
        a0 = fr.branch(v, states.xy_eigenstate(alpha, 0))
        a1 = fr.branch(v, states.xy_eigenstate(alpha, 1))
        fr.drop_axis(v)
        kk = fr.k
        for kind, t in targets:
            op = states.X if kind == "x" else states.Z
            a1 = states.apply_unitary_rho(a1, op, (fr.axis[t],), kk)
        fr.rho = a0 + a1
    for o in g.outputs:
        fr.ensure_active(o)
    if noise is not None:
        for o in g.outputs:
            ops = noise.kraus_for(o)
            if ops is not None:
                fr.kraus(ops, fr.axis[o])
    order = [fr.axis[o] for o in g.outputs]
    n_out = len(g.outputs)
    t = fr.rho.reshape([2] * fr.k + [2] * fr.k)
    t = np.moveaxis(t, order, list(range(n_out)))
    t = np.moveaxis(t, [fr.k + a for a in order], [fr.k + i for i in range(n_out)])
    dim = 2**fr.k
    rho = t.reshape(dim, dim)
    rho = rho / np.real(np.trace(rho))
    return states.DensityMatrix(n_out, rho)
