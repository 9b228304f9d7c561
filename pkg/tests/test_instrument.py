"""Teleportation instrument: graph, Kraus reconstruction, channel laws."""

import numpy as np

from mbqml import states
from mbqml.instrument import (
    CONTROLLED,
    TEXTBOOK_ANGLES,
    TRAINABLE_NODES,
    XY_COUNT,
    Z_NODES,
    build_teleport_ansatz,
    channel_residual,
    instrument_infidelity,
    kraus_operators,
    train_instrument,
)
from mbqml.mbqc import run_branches, validate_schedule

LABELS = ((0, 0), (0, 1), (1, 0), (1, 1))


def test_ansatz_shape_and_schedule():
    ansatz = build_teleport_ansatz()
    g = ansatz.graph
    assert g.num_nodes == 23
    assert g.inputs == (0, 4, 8) and g.outputs == (22,)
    assert set(ansatz.schedule) == set(g.measured_nodes())
    ms = ansatz.measurements(TEXTBOOK_ANGLES)
    validate_schedule(g, ms, ansatz.successor, ansatz.schedule)
    assert np.allclose(g.init_states[0], states.ZERO)
    assert np.allclose(g.init_states[4], states.ZERO)


def test_measurement_assignment():
    ansatz = build_teleport_ansatz()
    ms = ansatz.measurements({1: 0.7, 19: 0.2})
    for z in Z_NODES:
        assert ms[z].basis == "z"
    for v, ctrl in CONTROLLED.items():
        assert ms[v].controls == ctrl
    assert ms[1].angle == 0.7 and ms[1].controls == ()
    assert ms[19].angle == 0.2
    assert ms[21].angle == 0.0  # unmentioned nodes measure at zero
    assert ms[9].basis == "xy" and ms[9].angle == 0.0


def test_textbook_angles_teleport_perfectly():
    ansatz = build_teleport_ansatz()
    kraus = kraus_operators(ansatz, TEXTBOOK_ANGLES)
    assert set(kraus) == set(LABELS)
    assert channel_residual(kraus) < 1e-9
    rng = np.random.default_rng(501)
    batch = np.stack([states.haar_state(1, rng).amplitudes for _ in range(12)], axis=1)
    assert instrument_infidelity(kraus, batch) < 1e-9
    for k in kraus.values():
        # every branch contributes weight 1/4 and acts as a phase
        assert np.allclose(k.conj().T @ k, np.eye(2) / 4.0, atol=1e-9)
        assert abs(abs(np.trace(k)) - 1.0) < 1e-7


def test_channel_is_trace_preserving_at_any_angles():
    ansatz = build_teleport_ansatz()
    rng = np.random.default_rng(502)
    for _ in range(3):
        angles = {v: float(rng.uniform(-np.pi, np.pi)) for v in TRAINABLE_NODES}
        kraus = kraus_operators(ansatz, angles)
        assert channel_residual(kraus) < 1e-9


def test_kraus_predicts_arbitrary_inputs():
    # columns built from |0> and |1> must extend linearly to any input state
    ansatz = build_teleport_ansatz()
    rng = np.random.default_rng(503)
    angles = {v: float(rng.uniform(-np.pi, np.pi)) for v in TRAINABLE_NODES}
    kraus = kraus_operators(ansatz, angles)
    ms = ansatz.measurements(angles)
    zeros_select = {v: 0 for v in ansatz.graph.measured_nodes() if v not in Z_NODES}
    z_pos = [ansatz.schedule.index(z) for z in Z_NODES]
    psi = states.haar_state(1, rng)
    results = run_branches(
        ansatz.graph,
        ms,
        successor=ansatz.successor,
        schedule=ansatz.schedule,
        input_state=psi,
        select=zeros_select,
    )
    assert len(results) == 4
    total_p = 0.0
    for r in results:
        label = (r.outcomes[z_pos[0]], r.outcomes[z_pos[1]])
        v = kraus[label] @ psi.amplitudes
        p_pred = float(np.real(np.vdot(v, v))) * 2.0 ** (-XY_COUNT)
        assert abs(r.probability - p_pred) < 1e-12
        assert states.fidelity_pure(v / np.linalg.norm(v), r.state.amplitudes) > 1 - 1e-10
        total_p += r.probability
    assert abs(total_p - 2.0 ** (-XY_COUNT)) < 1e-12


def test_pinned_branch_choice_is_immaterial():
    # every XY branch carries the same Kraus up to a label phase, so pinning
    # all-ones instead of all-zeros reconstructs the same instrument
    ansatz = build_teleport_ansatz()
    rng = np.random.default_rng(504)
    angles = {v: float(rng.uniform(-np.pi, np.pi)) for v in TRAINABLE_NODES}
    ref = kraus_operators(ansatz, angles)
    ms = ansatz.measurements(angles)
    ones_select = {v: 1 for v in ansatz.graph.measured_nodes() if v not in Z_NODES}
    z_pos = [ansatz.schedule.index(z) for z in Z_NODES]
    scale = 2.0 ** (XY_COUNT / 2.0)
    alt = {b: np.zeros((2, 2), dtype=complex) for b in LABELS}
    for col, vec in enumerate((states.ZERO, states.ONE)):
        for r in run_branches(
            ansatz.graph,
            ms,
            successor=ansatz.successor,
            schedule=ansatz.schedule,
            input_state=states.StateVector(1, vec),
            select=ones_select,
        ):
            label = (r.outcomes[z_pos[0]], r.outcomes[z_pos[1]])
            alt[label][:, col] = r.state.amplitudes * np.sqrt(r.probability) * scale
    for b in LABELS:
        i = np.argmax(np.abs(ref[b]))
        phase = alt[b].flat[i] / ref[b].flat[i]
        assert abs(abs(phase) - 1.0) < 1e-8
        assert np.allclose(alt[b], phase * ref[b], atol=1e-8)


def test_corrections_off_breaks_teleportation():
    ansatz = build_teleport_ansatz()
    no_fix = {1: np.pi / 2, 14: -np.pi / 2, 19: 0.0, 20: 0.0, 21: 0.0}
    kraus = kraus_operators(ansatz, no_fix)
    assert channel_residual(kraus) < 1e-9  # still a channel, just the wrong one
    rng = np.random.default_rng(505)
    batch = np.stack([states.haar_state(1, rng).amplitudes for _ in range(12)], axis=1)
    assert instrument_infidelity(kraus, batch) > 0.3


def test_train_instrument_wiring():
    run, ansatz = train_instrument(0, n_train=4, n_test=3, steps=6, n_restarts=1)
    assert ansatz.graph.num_nodes == 23
    assert len(run.train_loss) <= 7 and len(run.train_loss) == len(run.test_loss)
    assert run.config["n_train"] == 4 and run.config["n_test"] == 3
    assert all(np.isfinite(x) for x in run.train_loss)
