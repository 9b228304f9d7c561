"""Measurement-based quantum machine learning toolkit.

Resource graphs with causal flow, translation of measurement patterns to
gate circuits, exact pure and density-matrix simulation, angle training,
and the derived applications: noise-robust gate learning, a quantum Fisher
information classifier, a learnable teleportation instrument, a quantum
kernel SVM, discrete hardware-constrained angle search, and Lie-algebra
expressivity probes.
"""

from .circuits import Gate, GateCircuit
from .flow import Flow, find_flow, verify_flow
from .graphs import OpenGraph, bipartition
from .hea import GreedyConfig, exhaustive_search, greedy_opt, inject_magic, random_search
from .instrument import build_teleport_ansatz, kraus_operators, train_instrument
from .kernel import embed, gram, kernel, make_dataset
from .learn import Adam, GateModel, PairDataset, fit, train_gate
from .lie import PauliString, extract_generators, lie_closure, variance_probe
from .mbqc import BranchResult, Measurement, run_branches, run_density, run_ideal, validate_schedule
from .muta import MutaGraph, MutaLayerSpec, MutaNetworkSpec, build_layer, build_network
from .noise import BitFlip, Depolarizing
from .qfi import QfiModel, qfi_oracle, train_qfi_classifier
from .states import DensityMatrix, StateVector
from .svm import SvmModel, svm_predict, svm_train
from .translate import translate, wire_map

__all__ = [
    "Adam",
    "BitFlip",
    "BranchResult",
    "DensityMatrix",
    "Depolarizing",
    "Flow",
    "Gate",
    "GateCircuit",
    "GateModel",
    "GreedyConfig",
    "Measurement",
    "MutaGraph",
    "MutaLayerSpec",
    "MutaNetworkSpec",
    "OpenGraph",
    "PairDataset",
    "PauliString",
    "QfiModel",
    "StateVector",
    "SvmModel",
    "bipartition",
    "build_layer",
    "build_network",
    "build_teleport_ansatz",
    "embed",
    "exhaustive_search",
    "extract_generators",
    "find_flow",
    "fit",
    "gram",
    "greedy_opt",
    "inject_magic",
    "kernel",
    "kraus_operators",
    "lie_closure",
    "make_dataset",
    "qfi_oracle",
    "random_search",
    "run_branches",
    "run_density",
    "run_ideal",
    "svm_predict",
    "svm_train",
    "train_gate",
    "train_instrument",
    "train_qfi_classifier",
    "translate",
    "validate_schedule",
    "variance_probe",
    "verify_flow",
    "wire_map",
]

__version__ = "0.1.0"
