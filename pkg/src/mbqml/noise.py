"""Noise models for pattern and circuit simulation.

Per-node channels plug into the density engine through kraus_for: the engine
calls it once per node, right after the node's last edge and just before its
measurement (for outputs, at finalization). Brownian circuit noise is a
different animal: random Hamiltonian kicks interleaved with circuit layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import states


@dataclass(frozen=True)
class Depolarizing:
    """With probability p the qubit is hit by X, Y or Z uniformly."""

    p: float
    nodes: frozenset[int] | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("depolarizing strength must lie in [0, 1]")
        if self.nodes is not None:
            object.__setattr__(self, "nodes", frozenset(self.nodes))

    def kraus_for(self, node: int) -> list[np.ndarray] | None:
        if self.nodes is not None and node not in self.nodes:
            return None
        if self.p == 0.0:
            return None
        a = np.sqrt(1.0 - self.p)
        b = np.sqrt(self.p / 3.0)
        return [a * states.I2, b * states.X, b * states.Y, b * states.Z]


@dataclass(frozen=True)
class BitFlip:
    """Independent X flip with probability p on each node it covers."""

    p: float
    nodes: frozenset[int] | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")
        if self.nodes is not None:
            object.__setattr__(self, "nodes", frozenset(self.nodes))

    def kraus_for(self, node: int) -> list[np.ndarray] | None:
        if self.nodes is not None and node not in self.nodes:
            return None
        if self.p == 0.0:
            return None
        return [np.sqrt(1.0 - self.p) * states.I2, np.sqrt(self.p) * states.X]

    def sample_flips(self, num_qubits: int, rng: np.random.Generator) -> np.ndarray:
        return rng.random(num_qubits) < self.p


def gue_hamiltonian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian unitary ensemble with unit-variance entries."""
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    return (g + g.conj().T) / np.sqrt(2.0)


def brownian_step(num_qubits: int, dt: float, rng: np.random.Generator) -> np.ndarray:
    """One kick exp(i H dt) with H drawn fresh from the GUE."""
    h = gue_hamiltonian(2**num_qubits, rng)
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(1j * evals * dt)) @ evecs.conj().T


def brownian_strength(num_qubits: int, num_steps: int, dt: float) -> float:
    """Dimensionless strength of a num_steps walk of GUE kicks of size dt."""
    return dt / (2.0 * np.pi) * np.sqrt(2.0**num_qubits * num_steps)
