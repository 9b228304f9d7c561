"""Datasets, optimizer, gradients, and the gate-learning loop."""

import numpy as np
import pytest

from mbqml import states
from mbqml.learn import (
    Adam,
    GateModel,
    PairDataset,
    TrainRun,
    angles_from_params,
    clean_test_fidelity,
    fit,
    flip_targets,
    noisy_infidelity,
    pure_infidelity,
    shift_gradient,
    train_gate,
)
from mbqml.muta import MutaLayerSpec, build_layer
from mbqml.noise import BitFlip


def _model(num_wires=1, tip=None):
    g = build_layer(MutaLayerSpec(num_wires=num_wires, tip=tip)).graph
    return GateModel.all_trainable(g)


def test_pair_dataset_build_and_split():
    rng = np.random.default_rng(301)
    u = states.haar_unitary(1, rng)
    ds = PairDataset.haar_gate_pairs(u, 1, 6, 4, rng)
    assert len(ds.pairs) == 6
    assert ds.train_idx == (0, 1, 2, 3) and ds.test_idx == (4, 5)
    for psi, phi in ds.pairs:
        assert np.allclose(phi.amplitudes, u @ psi.amplitudes, atol=1e-12)
    ins, outs = ds.matrices(ds.test_idx)
    assert ins.shape == (2, 2) and outs.shape == (2, 2)
    assert np.allclose(ins[:, 1], ds.pairs[5][0].amplitudes)


def test_pair_dataset_validation():
    rng = np.random.default_rng(302)
    a = states.haar_state(1, rng)
    b = states.haar_state(2, rng)
    with pytest.raises(ValueError):
        PairDataset((), (), ())
    with pytest.raises(ValueError):
        PairDataset(((a, b),), (0,), ())
    with pytest.raises(ValueError):
        PairDataset(((a, a), (a, a)), (0,), (0, 1))


def test_flip_targets():
    rng = np.random.default_rng(303)
    u = states.haar_unitary(2, rng)
    ds = PairDataset.haar_gate_pairs(u, 2, 4, 3, rng)
    same = flip_targets(ds, 0.0, np.random.default_rng(1))
    for (_, phi0), (_, phi1) in zip(ds.pairs, same.pairs):
        assert np.array_equal(phi0.amplitudes, phi1.amplitudes)
    xx = np.kron(states.X, states.X)
    allflip = flip_targets(ds, 1.0, np.random.default_rng(1))
    for (psi0, phi0), (psi1, phi1) in zip(ds.pairs, allflip.pairs):
        assert np.array_equal(psi0.amplitudes, psi1.amplitudes)
        assert np.allclose(phi1.amplitudes, xx @ phi0.amplitudes, atol=1e-12)
    assert allflip.train_idx == ds.train_idx and allflip.test_idx == ds.test_idx


def test_adam_behaves_like_adam():
    # bias-corrected first step is lr * sign(grad); long run solves quadratics
    opt = Adam(lr=0.05)
    p0 = np.array([1.0, -2.0, 0.5])
    g0 = np.array([3.0, -0.2, 1.0])
    p1 = opt.step(p0, g0)
    assert np.allclose(p1, p0 - 0.05 * np.sign(g0), atol=1e-6)

    target = np.array([0.3, -1.2, 2.0])
    opt = Adam(lr=0.05)
    p = np.zeros(3)
    for _ in range(400):
        p = opt.step(p, p - target)
    assert np.max(np.abs(p - target)) < 1e-3


def test_angles_from_params_ties_and_fixed():
    params = np.array([0.7, -0.2])
    slots = {0: (1, 3), 1: (2,)}
    fixed = {0: 0.5, 4: -1.0}
    angles = angles_from_params(params, slots, fixed)
    assert angles == {0: 0.5, 4: -1.0, 1: 0.7, 3: 0.7, 2: pytest.approx(-0.2)}


def test_shift_gradient_matches_finite_difference():
    rng = np.random.default_rng(304)
    model = _model(num_wires=2, tip=0)
    u = states.haar_unitary(2, rng)
    ds = PairDataset.haar_gate_pairs(u, 2, 5, 5, rng)
    ins, outs = ds.matrices(ds.train_idx)
    slots = {0: (0, 5), 1: (1,), 2: (2, 7), 3: (3,), 4: (6,)}
    fixed = {8: 0.4}
    loss = lambda a: pure_infidelity(model, a, ins, outs)
    eps = 1e-6
    for _ in range(3):
        params = rng.uniform(-np.pi, np.pi, size=5)
        grad = shift_gradient(loss, params, slots, fixed)
        for j in range(5):
            up, dn = params.copy(), params.copy()
            up[j] += eps
            dn[j] -= eps
            fd = (
                loss(angles_from_params(up, slots, fixed))
                - loss(angles_from_params(dn, slots, fixed))
            ) / (2 * eps)
            assert abs(grad[j] - fd) < 1e-5


def test_fit_respects_ties_fixed_and_history():
    t = np.array([0.4, 1.1, -0.8, 0.3])

    def loss(angles):
        return sum(1.0 - np.cos(angles[v] - t[v]) for v in range(4))

    slots = {0: (0, 1), 1: (2,)}
    fixed = {3: 0.9}
    run = fit(loss, slots, fixed, seed=7, steps=300, lr=0.05)
    assert len(run.train_loss) == 301
    assert run.test_loss == run.train_loss
    floor = 2.0 - 2.0 * abs(np.cos((t[0] - t[1]) / 2)) + (1.0 - np.cos(0.9 - t[3]))
    assert abs(run.final_train - floor) < 1e-3
    assert run.final_train < run.train_loss[0]


def test_fit_stop_below_and_init_params():
    def loss(angles):
        return 1.0 - np.cos(angles[0])

    run = fit(loss, {0: (0,)}, {}, seed=3, steps=200, lr=0.1, stop_below=0.05)
    assert run.final_train < 0.05
    assert len(run.train_loss) < 201

    frozen = fit(loss, {0: (0,)}, {}, seed=3, steps=0, init_params=np.array([1.3]))
    assert len(frozen.train_loss) == 1
    assert np.allclose(frozen.params, [1.3])
    assert abs(frozen.final_train - (1.0 - np.cos(1.3))) < 1e-12


def test_train_gate_reaches_single_qubit_target():
    rng = np.random.default_rng(305)
    model = _model(num_wires=1)
    target = states.haar_unitary(1, rng)
    run = train_gate(target, model, seed=11, n_pairs=6, n_train=4, steps=250)
    assert run.final_train < 1e-2
    assert run.final_test < 1e-2
    assert run.config["n_pairs"] == 6 and run.config["n_train"] == 4
    assert clean_test_fidelity(model, run, target, seed=11) > 1 - 2e-2


def test_noisy_loss_reduces_to_pure_at_zero_strength():
    rng = np.random.default_rng(306)
    model = _model(num_wires=2, tip=0)
    u = states.haar_unitary(2, rng)
    ds = PairDataset.haar_gate_pairs(u, 2, 3, 3, rng)
    ins, outs = ds.matrices(ds.train_idx)
    for _ in range(3):
        angles = {v: float(rng.uniform(-np.pi, np.pi)) for v in model.graph.measured_nodes()}
        a = pure_infidelity(model, angles, ins, outs)
        b = noisy_infidelity(model, angles, ins, outs, BitFlip(0.0))
        assert abs(a - b) < 1e-12


def test_noisy_training_path_runs():
    rng = np.random.default_rng(307)
    model = _model(num_wires=1)
    target = states.haar_unitary(1, rng)
    run = train_gate(
        target, model, seed=2, n_pairs=3, n_train=2, steps=3, noise=BitFlip(0.08)
    )
    assert len(run.train_loss) == 4
    assert all(0.0 <= x <= 1.0 + 1e-9 for x in run.train_loss)


def test_clean_test_fidelity_of_exact_params():
    rng = np.random.default_rng(308)
    model = _model(num_wires=1)
    angles = {v: float(rng.uniform(-np.pi, np.pi)) for v in model.graph.measured_nodes()}
    target = model.circuit(angles).unitary()
    params = np.array([angles[v] for v in sorted(angles)])
    run = TrainRun(seed=0, config={}, params=params, train_loss=[0.0], test_loss=[0.0])
    assert clean_test_fidelity(model, run, target, seed=9) > 1 - 1e-12
