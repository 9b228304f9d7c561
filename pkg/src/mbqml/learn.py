"""Losses, gradients, optimizer, and training loops for pattern learning.

Angles live in a dict node -> value. A parameter vector maps onto that dict
through slots: slots[j] lists the nodes tied to parameter j; fixed holds the
untrained nodes. Gradients use the parameter-shift rule per slot occurrence,
shifting one node by +-pi/2 at a time and summing, which stays exact for
losses linear in output-state expectations even when a parameter is tied
across several nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mbqc, states
from .flow import Flow, find_flow
from .graphs import OpenGraph
from .translate import translate

Slots = dict[int, tuple[int, ...]]


@dataclass(frozen=True)
class PairDataset:
    pairs: tuple[tuple[states.StateVector, states.StateVector], ...]
    train_idx: tuple[int, ...]
    test_idx: tuple[int, ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("empty dataset")
        n = self.pairs[0][0].num_qubits
        for a, b in self.pairs:
            if a.num_qubits != n or b.num_qubits != n:
                raise ValueError("all states must share the qubit count")
        if set(self.train_idx) & set(self.test_idx):
            raise ValueError("train and test splits overlap")

    @staticmethod
    def haar_gate_pairs(
        target: np.ndarray, num_qubits: int, n: int, n_train: int, rng: np.random.Generator
    ) -> "PairDataset":
        pairs = []
        for _ in range(n):
            psi = states.haar_state(num_qubits, rng)
            phi = states.StateVector(num_qubits, target @ psi.amplitudes)
            pairs.append((psi, phi))
        return PairDataset(tuple(pairs), tuple(range(n_train)), tuple(range(n_train, n)))

    def matrices(self, idx) -> tuple[np.ndarray, np.ndarray]:
        ins = np.stack([self.pairs[i][0].amplitudes for i in idx], axis=1)
        outs = np.stack([self.pairs[i][1].amplitudes for i in idx], axis=1)
        return ins, outs


def flip_targets(ds: PairDataset, p: float, rng: np.random.Generator) -> PairDataset:
    """Corrupt each target with independent per-qubit X flips, the faulty-data
    setting: below (1-p)^2 = 1/2 the unflipped majority still pins the gate."""
    flipped = []
    for psi, phi in ds.pairs:
        amps = phi.amplitudes
        n = phi.num_qubits
        for q in range(n):
            if rng.random() < p:
                amps = states.apply_unitary(amps, states.X, (q,), n)
        flipped.append((psi, states.StateVector(n, amps)))
    return PairDataset(tuple(flipped), ds.train_idx, ds.test_idx)


@dataclass
class Adam:
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    t: int = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        mhat = self.m / (1 - self.beta1**self.t)
        vhat = self.v / (1 - self.beta2**self.t)
        return params - self.lr * mhat / (np.sqrt(vhat) + self.eps)


def angles_from_params(params: np.ndarray, slots: Slots, fixed: dict[int, float]) -> dict[int, float]:
    angles = dict(fixed)
    for j, nodes in slots.items():
        for v in nodes:
            angles[v] = float(params[j])
    return angles


def shift_gradient(loss, params: np.ndarray, slots: Slots, fixed: dict[int, float]) -> np.ndarray:
    """Parameter-shift gradient of loss(angle dict), one +-pi/2 pair per slot
    occurrence. Exact for trigonometric losses of degree one per node angle."""
    base = angles_from_params(params, slots, fixed)
    grad = np.zeros_like(params)
    for j, nodes in slots.items():
        for v in nodes:
            up = dict(base)
            dn = dict(base)
            up[v] = base[v] + np.pi / 2
            dn[v] = base[v] - np.pi / 2
            grad[j] += (loss(up) - loss(dn)) / 2.0
    return grad


@dataclass(frozen=True)
class GateModel:
    """A trainable pattern: graph plus flow plus the slot layout of its
    measured angles."""

    graph: OpenGraph
    flow: Flow
    slots: Slots
    fixed: dict[int, float] = field(default_factory=dict)

    @staticmethod
    def all_trainable(g: OpenGraph, flow: Flow | None = None) -> "GateModel":
        fl = flow if flow is not None else find_flow(g)
        if fl is None:
            raise ValueError("graph has no flow")
        nodes = sorted(g.measured_nodes())
        return GateModel(g, fl, {j: (v,) for j, v in enumerate(nodes)})

    @property
    def num_params(self) -> int:
        return len(self.slots)

    def circuit(self, angles: dict[int, float]):
        return translate(self.graph, self.flow, angles)

    def apply(self, angles: dict[int, float], inputs: np.ndarray) -> np.ndarray:
        return self.circuit(angles).apply(inputs)


def pure_infidelity(model: GateModel, angles: dict[int, float], ins: np.ndarray, outs: np.ndarray) -> float:
    produced = model.apply(angles, ins)
    overlaps = np.sum(outs.conj() * produced, axis=0)
    return float(1.0 - np.mean(np.abs(overlaps) ** 2))


def noisy_infidelity(
    model: GateModel, angles: dict[int, float], ins: np.ndarray, outs: np.ndarray, noise
) -> float:
    num_qubits = int(np.log2(ins.shape[0]))
    fids = []
    for i in range(ins.shape[1]):
        psi = states.StateVector(num_qubits, ins[:, i])
        rho = mbqc.run_density(model.graph, angles, flow=model.flow, input_state=psi, noise=noise)
        fids.append(states.fidelity_pure_mixed(outs[:, i], rho.matrix))
    return float(1.0 - np.mean(fids))


@dataclass
class TrainRun:
    seed: int
    config: dict
    params: np.ndarray
    train_loss: list[float]
    test_loss: list[float]

    @property
    def final_train(self) -> float:
        return self.train_loss[-1]

    @property
    def final_test(self) -> float:
        return self.test_loss[-1]


def fit(
    loss_of_angles,
    model_slots: Slots,
    fixed: dict[int, float],
    seed: int,
    steps: int,
    lr: float = 0.05,
    test_loss_of_angles=None,
    init_params: np.ndarray | None = None,
    stop_below: float | None = None,
) -> TrainRun:
    rng = np.random.default_rng(seed)
    n = len(model_slots)
    if init_params is None:
        params = rng.uniform(-np.pi, np.pi, size=n)
        params = np.where(params == -np.pi, np.pi, params)
    else:
        params = np.array(init_params, dtype=float)
    opt = Adam(lr=lr)
    train_hist, test_hist = [], []
    for _ in range(steps):
        angles = angles_from_params(params, model_slots, fixed)
        train_hist.append(loss_of_angles(angles))
        test_hist.append(test_loss_of_angles(angles) if test_loss_of_angles else train_hist[-1])
        if stop_below is not None and train_hist[-1] < stop_below:
            break
        grad = shift_gradient(loss_of_angles, params, model_slots, fixed)
        params = opt.step(params, grad)
    else:
        angles = angles_from_params(params, model_slots, fixed)
        train_hist.append(loss_of_angles(angles))
        test_hist.append(test_loss_of_angles(angles) if test_loss_of_angles else train_hist[-1])
    return TrainRun(
        seed=seed,
        config={"steps": steps, "lr": lr},
        params=params,
        train_loss=train_hist,
        test_loss=test_hist,
    )


def train_gate(
    target: np.ndarray,
    model: GateModel,
    seed: int,
    *,
    n_pairs: int = 10,
    n_train: int = 7,
    steps: int = 500,
    lr: float = 0.05,
    noise=None,
    dataset: PairDataset | None = None,
) -> TrainRun:
    """Learn measurement angles reproducing a target unitary from state pairs."""
    num_qubits = int(np.log2(target.shape[0]))
    rng = np.random.default_rng(seed)
    if dataset is None:
        dataset = PairDataset.haar_gate_pairs(target, num_qubits, n_pairs, n_train, rng)
    tr_in, tr_out = dataset.matrices(dataset.train_idx)
    te_in, te_out = dataset.matrices(dataset.test_idx)

    if noise is None:
        train_loss = lambda a: pure_infidelity(model, a, tr_in, tr_out)
        test_loss = lambda a: pure_infidelity(model, a, te_in, te_out)
    else:
        train_loss = lambda a: noisy_infidelity(model, a, tr_in, tr_out, noise)
        test_loss = lambda a: noisy_infidelity(model, a, te_in, te_out, noise)

    run = fit(train_loss, model.slots, model.fixed, seed, steps, lr, test_loss_of_angles=test_loss)
    run.config.update({"n_pairs": len(dataset.pairs), "n_train": len(dataset.train_idx)})
    return run


def clean_test_fidelity(model: GateModel, run: TrainRun, target: np.ndarray, seed: int, n: int = 20) -> float:
    """Fidelity of the learned clean-resource gate against the target on fresh
    Haar states; the yardstick for models trained on corrupted data or noisy
    resources."""
    rng = np.random.default_rng(seed + 77_000)
    num_qubits = int(np.log2(target.shape[0]))
    ins = np.stack([states.haar_state(num_qubits, rng).amplitudes for _ in range(n)], axis=1)
    angles = angles_from_params(run.params, model.slots, model.fixed)
    produced = model.apply(angles, ins)
    wanted = target @ ins
    return float(np.mean(np.abs(np.sum(wanted.conj() * produced, axis=0)) ** 2))
