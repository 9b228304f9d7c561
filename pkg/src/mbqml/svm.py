"""Kernel SVM trained by sequential minimal optimization.

Works directly on a precomputed Gram matrix. Each accepted pair update solves
its two-variable subproblem exactly, so the dual objective never decreases;
the solver records it after every update for that invariant to be checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    C: float
    objective_history: list[float] = field(default_factory=list)
    sweeps: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 1e-8)


def dual_objective(alphas: np.ndarray, K: np.ndarray, y: np.ndarray) -> float:
    w = alphas * y
    return float(alphas.sum() - 0.5 * w @ K @ w)


def svm_train(
    K: np.ndarray,
    y: np.ndarray,
    *,
    C: float = 1.0,
    tol: float = 1e-3,
    rng: np.random.Generator | None = None,
    max_sweeps: int = 200,
    quiet_sweeps: int = 3,
) -> SvmModel:
    """Platt-style SMO on the dual problem. A KKT-violating point tries one
    random partner, then scans all of them; stops after quiet_sweeps sweeps
    with no accepted update (every point then satisfies KKT within tol)."""
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(K)):
        raise ValueError("gram matrix has non-finite entries")
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be +-1")
    rng = rng or np.random.default_rng(0)
    n = len(y)
    alphas = np.zeros(n)
    b = 0.0
    history = [dual_objective(alphas, K, y)]

    def decision(i):
        return (alphas * y) @ K[:, i] + b

    def try_pair(i, j, e_i):
        nonlocal b
        e_j = decision(j) - y[j]
        a_i, a_j = alphas[i], alphas[j]
        if y[i] == y[j]:
            lo, hi = max(0.0, a_i + a_j - C), min(C, a_i + a_j)
        else:
            lo, hi = max(0.0, a_j - a_i), min(C, C + a_j - a_i)
        if hi - lo < 1e-12:
            return False
        eta = 2 * K[i, j] - K[i, i] - K[j, j]
        if eta < 0:
            a_j_new = np.clip(a_j - y[j] * (e_i - e_j) / eta, lo, hi)
        else:
            # Flat pair (PSD K makes eta <= 0, so eta == 0 up to rounding):
            # the restricted dual is linear in a_j; take the better endpoint.
            slope = y[j] * (e_i - e_j)
            if slope > 0:
                a_j_new = hi
            elif slope < 0:
                a_j_new = lo
            else:
                return False
        if abs(a_j_new - a_j) < 1e-7:
            return False
        a_i_new = a_i + y[i] * y[j] * (a_j - a_j_new)
        alphas[i], alphas[j] = a_i_new, a_j_new
        b1 = b - e_i - y[i] * (a_i_new - a_i) * K[i, i] - y[j] * (a_j_new - a_j) * K[i, j]
        b2 = b - e_j - y[i] * (a_i_new - a_i) * K[i, j] - y[j] * (a_j_new - a_j) * K[j, j]
        if 0 < a_i_new < C:
            b = b1
        elif 0 < a_j_new < C:
            b = b2
        else:
            b = (b1 + b2) / 2
        history.append(dual_objective(alphas, K, y))
        return True

    quiet = 0
    sweeps = 0
    while quiet < quiet_sweeps and sweeps < max_sweeps:
        changed = 0
        for i in range(n):
            e_i = decision(i) - y[i]
            if not ((y[i] * e_i < -tol and alphas[i] < C) or (y[i] * e_i > tol and alphas[i] > 0)):
                continue
            j = int(rng.integers(n - 1))
            j += j >= i
            if try_pair(i, j, e_i):
                changed += 1
                continue
            # Random partner stalled: scan the rest before giving up on i.
            for j2 in rng.permutation(n):
                if j2 != i and try_pair(i, int(j2), e_i):
                    changed += 1
                    break
        quiet = quiet + 1 if changed == 0 else 0
        sweeps += 1
    return SvmModel(alphas, float(b), y, C, history, sweeps)


def decision_values(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    """K_cross[i, j] = kernel(train_i, query_j)."""
    return (model.alphas * model.labels) @ K_cross + model.bias


def svm_predict(model: SvmModel, K_cross: np.ndarray) -> np.ndarray:
    d = decision_values(model, K_cross)
    return np.where(d >= 0, 1.0, -1.0)
