"""Dense state vectors, density matrices, and the gate algebra used everywhere else.

States live as numpy arrays indexed in row-major qubit order: qubit 0 is the
most significant bit of the flat index. All operations are exact (complex128);
nothing here samples trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL = 1e-10

# single-qubit constants
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)
# magic state |0> + e^{-i pi/4}|1>, normalized
T_STATE = np.array([1, np.exp(-1j * np.pi / 4)], dtype=complex) / np.sqrt(2)


def rx(theta: float) -> np.ndarray:
    """exp(-i theta X / 2)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def rz(theta: float) -> np.ndarray:
    """exp(-i theta Z / 2)."""
    e = np.exp(-1j * theta / 2)
    return np.array([[e, 0], [0, np.conj(e)]])


def ising_xx(theta: float) -> np.ndarray:
    """exp(-i theta X(x)X / 2) on two qubits."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = c * np.eye(4, dtype=complex)
    out += -1j * s * np.kron(X, X)
    return out


CZ = np.diag([1, 1, 1, -1]).astype(complex)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def xy_eigenstate(alpha: float, outcome: int) -> np.ndarray:
    """Eigenvector of cos(a)X + sin(a)Y: (|0> +- e^{i a}|1>)/sqrt2.

    outcome 0 is the +1 branch, outcome 1 the -1 branch.
    """
    sign = 1.0 if outcome == 0 else -1.0
    return np.array([1, sign * np.exp(1j * alpha)], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class StateVector:
    """Pure state on ``num_qubits`` qubits; enforces normalization on build."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > ATOL:
            raise ValueError("state vector is not normalized")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state; hermitian, unit trace, PSD to -1e-9."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        d = 2**self.num_qubits
        if rho.shape != (d, d):
            raise ValueError(f"expected {d}x{d} matrix, got {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=ATOL):
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(rho).real - 1.0) > ATOL:
            raise ValueError("density matrix trace is not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-9:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", rho)

    @staticmethod
    def from_pure(psi: StateVector) -> "DensityMatrix":
        return DensityMatrix(psi.num_qubits, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def apply_unitary(psi: np.ndarray, u: np.ndarray, axes: tuple[int, ...], num_qubits: int) -> np.ndarray:
    """Apply a k-qubit unitary to the given qubit axes of a flat state vector.

    Works on arrays with trailing batch dimensions as long as the leading
    dimension is 2**num_qubits.
    """
    k = len(axes)
    if k == 1 and psi.ndim == 1:
        t = psi.reshape(2 ** axes[0], 2, -1)
        return np.matmul(u, t).reshape(-1)
    extra = psi.shape[1:]
    t = psi.reshape([2] * num_qubits + list(extra))
    t = np.moveaxis(t, axes, range(k))
    rest = t.shape[k:]
    t = u @ t.reshape(2**k, -1)
    t = t.reshape([2] * k + list(rest))
    t = np.moveaxis(t, range(k), axes)
    return t.reshape((2**num_qubits,) + extra)


def apply_unitary_rho(rho: np.ndarray, u: np.ndarray, axes: tuple[int, ...], num_qubits: int) -> np.ndarray:
    """rho -> U rho U^dag on the given qubit axes."""
    d = 2**num_qubits
    out = apply_unitary(rho, u, axes, num_qubits)  # left factor, columns as batch
    out = apply_unitary(out.conj().T.copy(), u, axes, num_qubits)
    return out.conj().T


def apply_kraus(rho: np.ndarray, kraus: list[np.ndarray], axes: tuple[int, ...], num_qubits: int) -> np.ndarray:
    out = np.zeros_like(rho)
    for k in kraus:
        out += apply_unitary_rho(rho, k, axes, num_qubits)
    return out


def partial_trace(rho: np.ndarray, keep: tuple[int, ...], num_qubits: int) -> np.ndarray:
    """Trace out all qubits not in ``keep`` (keep must be ascending)."""
    if list(keep) != sorted(keep):
        raise ValueError("keep must be ascending")
    t = rho.reshape([2] * (2 * num_qubits))
    drop = [q for q in range(num_qubits) if q not in keep]
    for n_done, q in enumerate(drop):
        ax = q - n_done
        n = num_qubits - n_done
        t = np.trace(t, axis1=ax, axis2=ax + n)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def fidelity_pure(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2, global-phase insensitive."""
    return float(abs(np.vdot(a, b)) ** 2)


def fidelity_pure_mixed(phi: np.ndarray, rho: np.ndarray) -> float:
    """<phi| rho |phi>."""
    return float(np.real(np.vdot(phi, rho @ phi)))


def operator_overlap(u: np.ndarray, v: np.ndarray) -> float:
    """|Tr(U^dag V)| / d: 1 iff U = V up to global phase."""
    d = u.shape[0]
    return float(abs(np.trace(u.conj().T @ v)) / d)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def haar_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state: normalized complex Gaussian vector."""
    d = 2**num_qubits
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(num_qubits, v / np.linalg.norm(v))


def haar_unitary(num_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    d = 2**num_qubits
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
