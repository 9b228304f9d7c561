"""Metrological-power oracle, probe model, and classifier training."""

import numpy as np
import pytest

from mbqml import states
from mbqml.qfi import (
    QfiModel,
    band_excluded_accuracy,
    estimate,
    hinge_loss,
    loss_and_gradients,
    monomials,
    qfi_oracle,
    sample_s1,
    sample_s2,
    train_qfi_classifier,
)

H_Z = (0.0, 0.0, 0.5)


def _exact_model():
    # with identity angles, p+ = |a_00|^2 and p- = |a_11|^2, and on the
    # |00>/|11> family 4 Var reduces to 4 - 4 (p+ - p-)^2
    return QfiModel(alphas=np.zeros(4), betas=np.array([4.0, 0, 0, -4.0, -4.0, 8.0]))


def test_oracle_reference_states():
    bell = states.StateVector(2, np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))
    assert abs(qfi_oracle(bell, H_Z) - 4.0) < 1e-12
    zz = states.StateVector(2, np.array([1, 0, 0, 0], dtype=complex))
    assert abs(qfi_oracle(zz, H_Z)) < 1e-12
    pp = states.StateVector(2, np.kron(states.PLUS, states.PLUS))
    assert abs(qfi_oracle(pp, H_Z) - 2.0) < 1e-12
    with pytest.raises(ValueError):
        qfi_oracle(bell, (0.5, 0.5, 0.5))


def test_oracle_closed_form_on_s1():
    rng = np.random.default_rng(401)
    for psi in sample_s1(30, rng):
        a = psi.amplitudes
        want = 4.0 * (1.0 - (abs(a[0]) ** 2 - abs(a[3]) ** 2) ** 2)
        assert abs(qfi_oracle(psi, H_Z) - want) < 1e-9


def test_oracle_separable_bound():
    rng = np.random.default_rng(402)
    for _ in range(30):
        prod = np.kron(states.haar_state(1, rng).amplitudes, states.haar_state(1, rng).amplitudes)
        psi = states.StateVector(2, prod)
        h = rng.standard_normal(3)
        h = tuple(0.5 * h / np.linalg.norm(h))
        assert qfi_oracle(psi, h) <= 2.0 + 1e-9


def test_sample_families():
    rng = np.random.default_rng(403)
    for psi in sample_s1(10, rng):
        assert abs(psi.amplitudes[1]) == 0.0 and abs(psi.amplitudes[2]) == 0.0
    plus2 = np.kron(states.PLUS, states.PLUS)
    minus = (states.ZERO - states.ONE) / np.sqrt(2)
    minus2 = np.kron(minus, minus)
    for psi in sample_s2(10, rng):
        w = abs(np.vdot(plus2, psi.amplitudes)) ** 2 + abs(np.vdot(minus2, psi.amplitudes)) ** 2
        assert abs(w - 1.0) < 1e-9


def test_model_validation_and_angle_map():
    with pytest.raises(ValueError):
        QfiModel(alphas=np.zeros(3), betas=np.zeros(6))
    with pytest.raises(ValueError):
        QfiModel(alphas=np.zeros(4), betas=np.zeros(5))
    m = QfiModel(alphas=np.array([0.1, 0.2, 0.3, 0.4]), betas=np.zeros(6))
    am = m.angle_map()
    assert am == {
        0: 0.1, 5: 0.1, 1: pytest.approx(0.2), 6: pytest.approx(0.2),
        2: pytest.approx(0.3), 7: pytest.approx(0.3), 3: 0.4, 8: 0.4,
    }
    assert m.angle_map({5: 1.5})[5] == 1.5


def test_probabilities_closed_form():
    rng = np.random.default_rng(404)
    alphas = rng.uniform(-np.pi, np.pi, size=4)
    m = QfiModel(alphas=alphas, betas=np.zeros(6))
    u = np.eye(2, dtype=complex)
    for a in alphas:
        u = states.H @ states.rz(-a) @ u
    full = np.kron(u, u)
    batch = np.stack([states.haar_state(2, rng).amplitudes for _ in range(7)], axis=1)
    out = full @ batch
    want = np.stack([np.abs(out[0, :]) ** 2, np.abs(out[3, :]) ** 2], axis=1)
    assert np.allclose(m.probabilities(batch), want, atol=1e-10)


def test_monomials_and_estimate():
    p = np.array([[0.2, 0.5], [0.0, 1.0]])
    mono = monomials(p)
    assert np.allclose(mono[0], [1.0, 0.2, 0.5, 0.04, 0.25, 0.1])
    assert np.allclose(mono[1], [1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    m = _exact_model()
    rng = np.random.default_rng(405)
    batch = np.stack([s.amplitudes for s in sample_s1(20, rng)], axis=1)
    f_hat = estimate(m, batch)
    want = np.array([qfi_oracle(states.StateVector(2, batch[:, i]), H_Z) for i in range(20)])
    assert np.allclose(f_hat, want, atol=1e-9)


def test_hinge_loss_values():
    f = np.array([3.0, 1.0])
    y = np.array([1.0, 0.0])
    assert hinge_loss(f, y, 0.5) == 0.0
    f = np.array([2.0, 2.0])
    assert abs(hinge_loss(f, y, 0.5) - 0.5) < 1e-12
    # mislabeled far-out points pay linearly
    assert abs(hinge_loss(np.array([0.0]), np.array([1.0]), 0.5) - 2.5) < 1e-12


def test_gradients_match_finite_difference():
    rng = np.random.default_rng(406)
    batch = np.stack([s.amplitudes for s in sample_s1(6, rng)], axis=1)
    labels = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.0])
    m = QfiModel(
        alphas=rng.uniform(-1.0, 1.0, size=4),
        betas=rng.uniform(-1.0, 1.0, size=6),
        epsilon=0.5,
    )
    f_hat = estimate(m, batch)
    margins = np.minimum(np.abs(f_hat - 2.5), np.abs(f_hat - 1.5))
    assert np.min(margins) > 1e-3  # away from hinge kinks, the loss is smooth
    loss, ga, gb = loss_and_gradients(m, batch, labels)
    assert abs(loss - hinge_loss(f_hat, labels, 0.5)) < 1e-12
    eps = 1e-6

    def loss_at(alphas, betas):
        mm = QfiModel(alphas=alphas, betas=betas, epsilon=0.5)
        return hinge_loss(estimate(mm, batch), labels, 0.5)

    for j in range(4):
        up, dn = m.alphas.copy(), m.alphas.copy()
        up[j] += eps
        dn[j] -= eps
        fd = (loss_at(up, m.betas) - loss_at(dn, m.betas)) / (2 * eps)
        assert abs(ga[j] - fd) < 1e-5
    for j in range(6):
        up, dn = m.betas.copy(), m.betas.copy()
        up[j] += eps
        dn[j] -= eps
        fd = (loss_at(m.alphas, up) - loss_at(m.alphas, dn)) / (2 * eps)
        assert abs(gb[j] - fd) < 1e-5


def test_band_excluded_accuracy():
    rng = np.random.default_rng(407)
    pool = sample_s1(80, rng)
    labels = np.array([int(qfi_oracle(s, H_Z) > 2.0) for s in pool])
    m = _exact_model()
    acc, kept = band_excluded_accuracy(m, pool, labels, band=(1.9, 2.1))
    assert acc == 1.0
    assert 0 < kept <= 80
    acc0, kept0 = band_excluded_accuracy(m, pool, labels, band=(-1e9, 1e9))
    assert (acc0, kept0) == (0.0, 0)


def test_training_reduces_loss():
    rng = np.random.default_rng(408)
    pool = sample_s1(40, rng)
    labels = np.array([int(qfi_oracle(s, H_Z) > 2.0) for s in pool])
    res = train_qfi_classifier(pool, labels, seed=5, steps=120)
    assert len(res.train_loss) == 121
    assert res.train_loss[-1] < res.train_loss[0]
    assert res.config["steps"] == 120 and res.config["seed"] == 5
