"""Metrological usefulness classifier.

A two-qubit probe state evolves as exp(-i theta H) with H = h x 1 + 1 x h and
h a normalized Pauli combination (coefficients squared summing to 1/4), so
separable probes satisfy F_Q <= 2 while entangled ones reach up to 4. The
classifier pipes the state through a disconnected two-wire layer with
column-tied angles, reads p+ = P(00) and p- = P(11) from a (Z,Z) measurement,
estimates F via a degree-two polynomial in (p+, p-), and trains both the
angles and the polynomial against hinge losses around the F = 2 boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import states
from .flow import find_flow
from .learn import Adam
from .muta import MutaLayerSpec, build_layer
from .translate import translate

_MONOMIALS = ("1", "p+", "p-", "p+^2", "p-^2", "p+p-")


def qfi_oracle(psi: states.StateVector, h_coeffs: tuple[float, float, float]) -> float:
    """4 Var(H) for the collective two-qubit generator built from h."""
    ax, ay, az = h_coeffs
    if abs(ax**2 + ay**2 + az**2 - 0.25) > 1e-9:
        raise ValueError("h coefficients must satisfy ax^2+ay^2+az^2 = 1/4")
    h = ax * states.X + ay * states.Y + az * states.Z
    big_h = np.kron(h, states.I2) + np.kron(states.I2, h)
    v = psi.amplitudes
    mean = np.real(np.vdot(v, big_h @ v))
    second = np.real(np.vdot(v, big_h @ (big_h @ v)))
    return float(4.0 * (second - mean**2))


def sample_s1(n: int, rng: np.random.Generator) -> list[states.StateVector]:
    """cos(t)|00> + e^{i phi} sin(t)|11>, t and phi uniform on (0, 2pi)."""
    out = []
    for _ in range(n):
        t = rng.uniform(0, 2 * np.pi)
        phi = rng.uniform(0, 2 * np.pi)
        amps = np.zeros(4, dtype=complex)
        amps[0] = np.cos(t)
        amps[3] = np.exp(1j * phi) * np.sin(t)
        out.append(states.StateVector(2, amps))
    return out


def sample_s2(n: int, rng: np.random.Generator) -> list[states.StateVector]:
    """cos(t)|++> + e^{i phi} sin(t)|-->, t and phi uniform on (0, 2pi)."""
    plus2 = np.kron(states.PLUS, states.PLUS)
    minus = (states.ZERO - states.ONE) / np.sqrt(2)
    minus2 = np.kron(minus, minus)
    out = []
    for _ in range(n):
        t = rng.uniform(0, 2 * np.pi)
        phi = rng.uniform(0, 2 * np.pi)
        amps = np.cos(t) * plus2 + np.exp(1j * phi) * np.sin(t) * minus2
        out.append(states.StateVector(2, amps / np.linalg.norm(amps)))
    return out


@dataclass
class QfiModel:
    """Column-tied angles on the two-wire disconnected layer plus polynomial
    coefficients over the 6 monomials (1, p+, p-, p+^2, p-^2, p+p-)."""

    alphas: np.ndarray
    betas: np.ndarray
    epsilon: float = 0.5
    _graph: object = field(default=None, repr=False)
    _flow: object = field(default=None, repr=False)

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=float)
        self.betas = np.asarray(self.betas, dtype=float)
        if self.alphas.shape != (4,):
            raise ValueError("four column-tied angles expected")
        if self.betas.shape != (6,):
            raise ValueError("six polynomial coefficients expected")
        if self._graph is None:
            layer = build_layer(MutaLayerSpec(num_wires=2))
            self._graph = layer.graph
            self._flow = find_flow(self._graph)

    def angle_map(self, overrides: dict[int, float] | None = None) -> dict[int, float]:
        angles = {}
        for c in range(4):
            angles[c] = float(self.alphas[c])
            angles[5 + c] = float(self.alphas[c])
        if overrides:
            angles.update(overrides)
        return angles

    def probabilities(self, batch: np.ndarray, overrides: dict[int, float] | None = None) -> np.ndarray:
        """Columns of batch -> rows of (p+, p-)."""
        circ = translate(self._graph, self._flow, self.angle_map(overrides))
        out = circ.apply(batch)
        p_plus = np.abs(out[0, :]) ** 2
        p_minus = np.abs(out[3, :]) ** 2
        return np.stack([p_plus, p_minus], axis=1)


def monomials(p: np.ndarray) -> np.ndarray:
    """Rows (p+, p-) -> rows of the 6 monomial values."""
    pp, pm = p[:, 0], p[:, 1]
    return np.stack([np.ones_like(pp), pp, pm, pp**2, pm**2, pp * pm], axis=1)


def estimate(model: QfiModel, batch: np.ndarray) -> np.ndarray:
    return monomials(model.probabilities(batch)) @ model.betas


def hinge_loss(f_hat: np.ndarray, labels: np.ndarray, epsilon: float) -> float:
    above = np.maximum(0.0, -f_hat + 2.0 + epsilon)
    below = np.maximum(0.0, f_hat - 2.0 + epsilon)
    return float(np.mean(labels * above + (1 - labels) * below))


def _hinge_slope(f_hat: np.ndarray, labels: np.ndarray, epsilon: float) -> np.ndarray:
    # Subgradient wrt f_hat; 0 exactly at the kink.
    slope = np.zeros_like(f_hat)
    slope[(labels == 1) & (-f_hat + 2.0 + epsilon > 0)] = -1.0
    slope[(labels == 0) & (f_hat - 2.0 + epsilon > 0)] = 1.0
    return slope / len(f_hat)


def loss_and_gradients(model: QfiModel, batch: np.ndarray, labels: np.ndarray):
    """Hinge loss with analytic beta gradient and chain-ruled alpha gradient.

    The probabilities are expectation-linear in each node angle, so their
    derivatives come from per-node parameter shifts; the polynomial and hinge
    wrap around them analytically. A plain shift of the tied parameter through
    the whole loss would be wrong here: the loss is quadratic in p.
    """
    p = model.probabilities(batch)
    mono = monomials(p)
    f_hat = mono @ model.betas
    loss = hinge_loss(f_hat, labels, model.epsilon)
    slope = _hinge_slope(f_hat, labels, model.epsilon)

    grad_beta = mono.T @ slope

    b = model.betas
    df_dp = np.stack(
        [
            b[1] + 2 * b[3] * p[:, 0] + b[5] * p[:, 1],
            b[2] + 2 * b[4] * p[:, 1] + b[5] * p[:, 0],
        ],
        axis=1,
    )
    grad_alpha = np.zeros(4)
    for c in range(4):
        for node in (c, 5 + c):
            up = model.probabilities(batch, {node: model.alphas[c] + np.pi / 2})
            dn = model.probabilities(batch, {node: model.alphas[c] - np.pi / 2})
            dp = (up - dn) / 2.0
            grad_alpha[c] += float(np.sum(slope[:, None] * df_dp * dp))
    return loss, grad_alpha, grad_beta


@dataclass
class QfiTrainResult:
    model: QfiModel
    train_loss: list[float]
    config: dict


def train_qfi_classifier(
    train_states: list[states.StateVector],
    train_labels: np.ndarray,
    seed: int,
    *,
    steps: int = 1500,
    lr: float = 0.05,
    epsilon: float = 0.5,
) -> QfiTrainResult:
    rng = np.random.default_rng(seed)
    alphas = rng.uniform(-np.pi, np.pi, size=4)
    model = QfiModel(alphas=alphas, betas=np.zeros(6), epsilon=epsilon)
    batch = np.stack([s.amplitudes for s in train_states], axis=1)
    labels = np.asarray(train_labels, dtype=float)
    opt_a, opt_b = Adam(lr=lr), Adam(lr=lr)
    history = []
    for _ in range(steps):
        loss, ga, gb = loss_and_gradients(model, batch, labels)
        history.append(loss)
        model.alphas = opt_a.step(model.alphas, ga)
        model.betas = opt_b.step(model.betas, gb)
    history.append(hinge_loss(estimate(model, batch), labels, epsilon))
    return QfiTrainResult(
        model=model,
        train_loss=history,
        config={"steps": steps, "lr": lr, "epsilon": epsilon, "seed": seed},
    )


def band_excluded_accuracy(
    model: QfiModel,
    test_states: list[states.StateVector],
    test_labels: np.ndarray,
    band: tuple[float, float] = (1.9, 2.1),
) -> tuple[float, int]:
    """Accuracy over states whose estimate falls outside the margin band;
    returns (accuracy, number of states kept)."""
    batch = np.stack([s.amplitudes for s in test_states], axis=1)
    f_hat = estimate(model, batch)
    keep = (f_hat <= band[0]) | (f_hat >= band[1])
    if not np.any(keep):
        return 0.0, 0
    pred = (f_hat > 2.0).astype(int)
    labels = np.asarray(test_labels, dtype=int)
    acc = float(np.mean(pred[keep] == labels[keep]))
    return acc, int(np.sum(keep))
