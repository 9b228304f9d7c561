"""Quantum kernel from a fixed two-wire embedding, plus toy 2-D datasets.

The feature map runs the two-wire connected layer on |00> with data-dependent
angles: both data coordinates enter as Z-rotations before and after an XX
coupling of angle cos(x0)cos(x1). Closed form:

    |phi(x)> = cos(c/2) e^{i(x0+x1)} |00> + i sin(c/2) |11>,  c = cos(x0)cos(x1)

`embedding_states` evaluates that form vectorized; `embed_pattern` runs the
actual measurement pattern and must agree (tested).
"""

from __future__ import annotations

import numpy as np

from . import states
from .flow import find_flow
from .mbqc import run_ideal
from .muta import MutaLayerSpec, build_layer

CIRCLE_RADII = (1.0, 0.6)
BLOB_CENTERS = ((-1.0, -1.0), (1.0, 1.0))


def embedding_angles(x) -> dict[int, float]:
    """Pattern angles realizing the embedding on the connected two-wire layer."""
    x0, x1 = float(x[0]), float(x[1])
    theta = np.cos(x0) * np.cos(x1)
    return {0: x0, 5: x1, 6: theta, 1: 0.0, 2: x0, 7: x1, 3: 0.0, 8: 0.0}


def embed_pattern(x) -> states.StateVector:
    """Feature state via the measurement pattern itself (reference path)."""
    g = build_layer(MutaLayerSpec(num_wires=2, tip=0)).graph
    zero2 = states.StateVector(2, np.kron(states.ZERO, states.ZERO))
    psi, _ = run_ideal(g, embedding_angles(x), flow=find_flow(g), input_state=zero2)
    return psi


def embedding_states(xs: np.ndarray) -> np.ndarray:
    """Closed-form feature states for an (n, 2) array, returned as (4, n)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    c = np.cos(xs[:, 0]) * np.cos(xs[:, 1])
    phases = np.exp(1j * (xs[:, 0] + xs[:, 1]))
    phi = np.zeros((4, xs.shape[0]), dtype=complex)
    phi[0] = np.cos(c / 2) * phases
    phi[3] = 1j * np.sin(c / 2)
    return phi


def embed(x) -> states.StateVector:
    return states.StateVector(2, embedding_states(np.asarray(x)[None, :])[:, 0])


def kernel(x, y) -> float:
    """K(x, y) = |<phi(x)|phi(y)>|^2."""
    return float(gram(np.asarray(x)[None, :], np.asarray(y)[None, :])[0, 0])


def gram(xa: np.ndarray, xb: np.ndarray | None = None) -> np.ndarray:
    pa = embedding_states(xa)
    pb = pa if xb is None else embedding_states(xb)
    return np.abs(pa.conj().T @ pb) ** 2


def make_dataset(
    kind: str,
    n: int,
    rng: np.random.Generator,
    *,
    noise: float = 0.1,
    radii: tuple[float, float] = CIRCLE_RADII,
) -> tuple[np.ndarray, np.ndarray]:
    """Balanced labeled 2-D points; labels are +-1. n must be even."""
    if n < 4 or n % 2:
        raise ValueError("need an even n >= 4")
    half = n // 2
    if kind == "circles":
        t = rng.uniform(0.0, 2 * np.pi, size=n)
        r = np.repeat(radii, half)
        pts = np.stack([r * np.cos(t), r * np.sin(t)], axis=1)
    elif kind == "blobs":
        pts = np.repeat(np.asarray(BLOB_CENTERS), half, axis=0).astype(float)
    elif kind == "moons":
        t = rng.uniform(0.0, np.pi, size=n)
        upper = np.stack([np.cos(t[:half]), np.sin(t[:half])], axis=1)
        lower = np.stack([1.0 - np.cos(t[half:]), 0.5 - np.sin(t[half:])], axis=1)
        pts = np.concatenate([upper, lower], axis=0)
    else:
        raise ValueError(f"unknown dataset kind: {kind!r}")
    pts = pts + noise * rng.standard_normal(pts.shape)
    labels = np.repeat([-1.0, 1.0], half)
    order = rng.permutation(n)
    return pts[order], labels[order]
