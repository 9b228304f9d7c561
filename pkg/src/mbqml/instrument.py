"""Learnable quantum instrument: teleportation between wires.

One 23-node graph, three wires. The pair wire 0-1-2-3-13-14-15-16-17 and the
output wire 4-5-6-7-18-19-20-21-22 both start from |0>; the state wire
8-9-10-11-12 carries the unknown qubit. A triangle with tip 5 and trainable
center 1 entangles the first two wires into a pair; a second triangle with
tip 11 and trainable center 14 fuses the unknown state with the pair half
travelling on the first wire. Computational-basis readouts at 12 and 17
record the fusion result, and the pair (bit at 12, bit at 17) labels the
branch. On the output wire, controlled nodes 19, 20, 21 fire their angles
only when every controlling bit is 1, supplying the outcome-conditioned
correction before the state reaches node 22. Each label's branch is a 2x2
Kraus operator K_b on the teleported qubit, and the four of them must
compose to a trace-preserving channel.

Every XY outcome is corrected by the partial successor map, so each XY branch
has weight exactly 1/2; simulating only the all-zero XY branch per label and
rescaling by 2^(xy_count/2) therefore reconstructs K_b exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import states
from .graphs import OpenGraph
from .learn import TrainRun, fit
from .mbqc import Measurement, run_branches

_WIRE_EDGES = [
    (0, 1), (1, 2), (2, 3), (3, 13), (13, 14), (14, 15), (15, 16), (16, 17),
    (4, 5), (5, 6), (6, 7), (7, 18), (18, 19), (19, 20), (20, 21), (21, 22),
    (8, 9), (9, 10), (10, 11), (11, 12),
]
_TRIANGLE_EDGES = [(5, 0), (5, 2), (11, 13), (11, 15)]

TRAINABLE_NODES = (1, 14, 19, 20, 21)
CONTROLLED = {19: (12,), 20: (17,), 21: (17,)}
Z_NODES = (12, 17)
INPUT_NODE = 8
OUTPUT_NODE = 22
XY_COUNT = 20

# Entangle and fuse at +-pi/2, flip at pi: the classic protocol in angle form.
TEXTBOOK_ANGLES = {1: np.pi / 2, 14: -np.pi / 2, 19: np.pi, 20: np.pi, 21: np.pi}

_SUCCESSOR = {
    0: 1, 1: 2, 2: 3, 3: 13, 13: 14, 14: 15, 15: 16, 16: 17,
    4: 5, 5: 6, 6: 7, 7: 18, 18: 19, 19: 20, 20: 21, 21: 22,
    8: 9, 9: 10, 10: 11, 11: 12,
}
# Wires interleave so every correction lands on a still-unmeasured node.
_SCHEDULE = (4, 0, 1, 8, 5, 2, 9, 6, 3, 10, 13, 14, 7, 15, 11, 12, 16, 17, 18, 19, 20, 21)


@dataclass(frozen=True)
class TeleportAnsatz:
    graph: OpenGraph
    successor: dict[int, int]
    schedule: tuple[int, ...]

    def measurements(self, angles: dict[int, float]) -> dict[int, Measurement]:
        ms = {}
        for v in self.graph.measured_nodes():
            if v in Z_NODES:
                ms[v] = Measurement(basis="z")
            elif v in CONTROLLED:
                ms[v] = Measurement(angle=angles.get(v, 0.0), controls=CONTROLLED[v])
            else:
                ms[v] = Measurement(angle=angles.get(v, 0.0))
        return ms


def build_teleport_ansatz() -> TeleportAnsatz:
    g = OpenGraph(
        num_nodes=23,
        edges=tuple(_WIRE_EDGES + _TRIANGLE_EDGES),
        inputs=(0, 4, INPUT_NODE),
        outputs=(OUTPUT_NODE,),
        init_states={0: "zero", 4: "zero"},
    )
    return TeleportAnsatz(graph=g, successor=dict(_SUCCESSOR), schedule=_SCHEDULE)


def kraus_operators(ansatz: TeleportAnsatz, angles: dict[int, float]) -> dict[tuple[int, int], np.ndarray]:
    """One 2x2 operator per label (bit at 12, bit at 17)."""
    ms = ansatz.measurements(angles)
    scale = 2.0 ** (XY_COUNT / 2.0)
    zeros_select = {v: 0 for v in ansatz.graph.measured_nodes() if v not in Z_NODES}
    z_pos = [ansatz.schedule.index(z) for z in Z_NODES]
    ops = {b: np.zeros((2, 2), dtype=complex) for b in ((0, 0), (0, 1), (1, 0), (1, 1))}
    for col, basis_vec in enumerate((states.ZERO, states.ONE)):
        results = run_branches(
            ansatz.graph,
            ms,
            successor=ansatz.successor,
            schedule=ansatz.schedule,
            input_state=states.StateVector(1, basis_vec),
            select=zeros_select,
        )
        for r in results:
            label = (r.outcomes[z_pos[0]], r.outcomes[z_pos[1]])
            ops[label][:, col] = r.state.amplitudes * np.sqrt(r.probability) * scale
    return ops


def channel_residual(kraus: dict[tuple[int, int], np.ndarray]) -> float:
    """Largest deviation of sum K^dag K from the identity."""
    total = sum(k.conj().T @ k for k in kraus.values())
    return float(np.max(np.abs(total - np.eye(2))))


def instrument_infidelity(kraus: dict[tuple[int, int], np.ndarray], batch: np.ndarray) -> float:
    """1 - mean over states of the branch-weighted teleported fidelity.

    Summing |<psi|K_b psi>|^2 over labels equals sum_b p_b F_b exactly.
    """
    total = np.zeros(batch.shape[1])
    for k in kraus.values():
        total += np.abs(np.einsum("ij,jn,in->n", k, batch, batch.conj())) ** 2
    return float(1.0 - np.mean(total))


def train_instrument(
    seed: int,
    *,
    n_train: int = 35,
    n_test: int = 15,
    steps: int = 250,
    lr: float = 0.05,
    n_restarts: int = 3,
    restart_tol: float = 1e-6,
) -> tuple[TrainRun, TeleportAnsatz]:
    """Fit the five instrument angles, restarting from fresh inits while the
    train loss sits above restart_tol; the best restart is returned."""
    ansatz = build_teleport_ansatz()
    rng = np.random.default_rng(seed)
    train_batch = np.stack([states.haar_state(1, rng).amplitudes for _ in range(n_train)], axis=1)
    test_batch = np.stack([states.haar_state(1, rng).amplitudes for _ in range(n_test)], axis=1)
    slots = {j: (v,) for j, v in enumerate(TRAINABLE_NODES)}

    def loss_on(batch):
        def loss(angles: dict[int, float]) -> float:
            return instrument_infidelity(kraus_operators(ansatz, angles), batch)

        return loss

    best = None
    for _ in range(n_restarts):
        init = rng.uniform(-np.pi, np.pi, size=len(slots))
        run = fit(
            loss_on(train_batch),
            slots,
            {},
            seed,
            steps,
            lr,
            test_loss_of_angles=loss_on(test_batch),
            init_params=init,
            stop_below=restart_tol * 1e-4,
        )
        if best is None or run.final_train < best.final_train:
            best = run
        if best.final_train < restart_tol:
            break
    best.config.update({"n_train": n_train, "n_test": n_test})
    return best, ansatz
