"""Discrete angle search over the hardware-native set {0, pi/4, pi/2}.

Greedy slice search: angles are grouped into slices ordered like the
measurement schedule; pass m exhaustively re-optimizes every window of m
consecutive slices while freezing the rest. A slice may include output-column
nodes, whose entries are inert; enumeration covers them anyway, keeping the
bookkeeping aligned with the slice schedule.

Magic-state injection widens what the discrete set can reach: with |T> states
injected on two interior nodes the two-wire layer hits a non-Clifford
target exactly at the all-zeros pattern, while without injection the same
search set contains no solution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import states
from .flow import find_flow
from .graphs import OpenGraph
from .muta import MutaLayerSpec, build_layer
from .translate import translate

ANGLE_SET = (0.0, np.pi / 4, np.pi / 2)
CLIFFORD_ANGLES = (0.0, np.pi / 2)
TWO_WIRE_SLICES = ((0,), (5,), (6,), (1,), (2, 7), (3, 8), (4, 9))
MAGIC_NODES = (2, 6)

_WINDOW_GUARD = 12


@dataclass(frozen=True)
class GreedyConfig:
    epsilon: float = 0.0
    n_reset: int = 1
    l_max: int = 4
    delta: float = 1e-3

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.n_reset < 1 or self.l_max < 1:
            raise ValueError("n_reset and l_max must be at least 1")


@dataclass
class SearchResult:
    success: bool
    best_theta: dict[int, float]
    best_loss: float
    evaluations: list[float] = field(default_factory=list)

    @property
    def best_curve(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.evaluations))


class _EvalLog:
    def __init__(self, loss):
        self.loss = loss
        self.values: list[float] = []
        self.best = np.inf
        self.best_theta: dict[int, float] | None = None

    def __call__(self, theta):
        val = float(self.loss(theta))
        self.values.append(val)
        if val < self.best:
            self.best = val
            self.best_theta = dict(theta)
        return val


def _check_slices(slices):
    nodes = [v for s in slices for v in s]
    if len(set(nodes)) != len(nodes):
        raise ValueError("slices must be disjoint")
    return nodes


def _layer_opt(ev, theta, slices, m, epsilon, angle_set, rng):
    theta_best = dict(theta)
    loss_best = ev(theta_best)
    for i in range(len(slices) - m + 1):
        window = tuple(v for s in slices[i : i + m] for v in s)
        if len(window) > _WINDOW_GUARD:
            raise ValueError(f"slice window of {len(window)} nodes is too large to enumerate")
        for assignment in itertools.product(angle_set, repeat=len(window)):
            theta_curr = dict(theta_best)
            theta_curr.update(zip(window, assignment))
            val = ev(theta_curr)
            if val < loss_best or rng.random() < epsilon:
                theta_best, loss_best = theta_curr, val
    return theta_best, loss_best


def greedy_opt(
    loss,
    slices,
    cfg: GreedyConfig,
    rng: np.random.Generator,
    *,
    angle_set: tuple[float, ...] = ANGLE_SET,
) -> SearchResult:
    """Slice-wise epsilon-greedy descent with exhaustive windows.

    Passes m = 1..l_max enumerate every m-slice window; a candidate replaces
    the working pattern when it improves the loss, or with probability
    epsilon regardless. Stops as soon as the working loss drops below delta;
    otherwise reinitializes, up to n_reset times. Every loss call is logged.
    """
    nodes = _check_slices(slices)
    if cfg.l_max > len(slices):
        raise ValueError("l_max exceeds the number of slices")
    ev = _EvalLog(loss)
    for _ in range(cfg.n_reset):
        theta = {v: angle_set[rng.integers(len(angle_set))] for v in nodes}
        for m in range(1, cfg.l_max + 1):
            theta, current = _layer_opt(ev, theta, slices, m, cfg.epsilon, angle_set, rng)
            if current < cfg.delta:
                return SearchResult(True, dict(theta), current, ev.values)
    return SearchResult(False, dict(ev.best_theta), ev.best, ev.values)


def random_search(
    loss,
    nodes,
    budget: int,
    rng: np.random.Generator,
    *,
    angle_set: tuple[float, ...] = ANGLE_SET,
) -> SearchResult:
    """Uniform i.i.d. baseline over the same discrete set."""
    if budget < 1:
        raise ValueError("budget must be at least 1")
    ev = _EvalLog(loss)
    for _ in range(budget):
        ev({v: angle_set[rng.integers(len(angle_set))] for v in nodes})
    return SearchResult(False, dict(ev.best_theta), ev.best, ev.values)


def exhaustive_search(loss, nodes, *, angle_set: tuple[float, ...] = ANGLE_SET):
    """Every assignment in order; returns (best theta, array of all losses)."""
    nodes = tuple(nodes)
    if len(angle_set) ** len(nodes) > 60_000:
        raise ValueError("exhaustive enumeration too large")
    values = []
    best = (np.inf, None)
    for assignment in itertools.product(angle_set, repeat=len(nodes)):
        theta = dict(zip(nodes, assignment))
        val = float(loss(theta))
        values.append(val)
        if val < best[0]:
            best = (val, theta)
    return best[1], np.asarray(values)


def inject_magic(g: OpenGraph, nodes) -> OpenGraph:
    """Set |T> = (|0> + e^{-i pi/4}|1>)/sqrt(2) inits on measured non-inputs."""
    for v in nodes:
        if v in g.inputs:
            raise ValueError(f"node {v} is an input; injection targets resource nodes")
        if v in g.outputs:
            raise ValueError(f"node {v} is an output and never measured")
    init = dict(g.init_states)
    init.update({v: "T" for v in nodes})
    return OpenGraph(g.num_nodes, g.edges, g.inputs, g.outputs, init)


def t_gate() -> np.ndarray:
    return np.diag([1.0, np.exp(-1j * np.pi / 4)])


def t_isingxx_target() -> np.ndarray:
    return np.kron(t_gate(), np.eye(2)) @ states.ising_xx(-np.pi / 4)


def make_pattern_loss(g: OpenGraph, target: np.ndarray, seed: int, *, n_pairs: int = 7):
    """Mean infidelity of the translated circuit against target, over a fixed
    bag of Haar input states. Angles for nodes outside the pattern (output
    columns) are accepted and ignored."""
    fl = find_flow(g)
    if fl is None:
        raise ValueError("graph has no flow")
    measured = set(g.measured_nodes())
    rng = np.random.default_rng(seed)
    dim = target.shape[0]
    nq = int(np.log2(dim))
    ins = np.stack([states.haar_state(nq, rng).amplitudes for _ in range(n_pairs)], axis=1)
    outs = target @ ins

    def loss(theta):
        angles = {v: theta[v] for v in measured}
        psi = translate(g, fl, angles).apply(ins)
        return 1.0 - float(np.mean(np.abs(np.einsum("dn,dn->n", outs.conj(), psi)) ** 2))

    return loss


def two_wire_graph(*, magic: bool = True) -> OpenGraph:
    g = build_layer(MutaLayerSpec(num_wires=2, tip=0)).graph
    return inject_magic(g, MAGIC_NODES) if magic else g
