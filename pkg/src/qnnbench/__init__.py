"""Simulated quantum neural network benchmark: statevector simulator,
two-qubit-gate classifier circuit, gradient engines, MNIST preprocessing,
a parameter-matched dense baseline, and the experiment harness."""

from .statevec import Pauli, StateVector, basis_state
from .circuit import Circuit, GateSpec, build_qnn, evaluate, model_expectation
from .qml import LabeledState, SuperpositionBatch

__all__ = [
    "Pauli",
    "StateVector",
    "basis_state",
    "Circuit",
    "GateSpec",
    "build_qnn",
    "evaluate",
    "model_expectation",
    "LabeledState",
    "SuperpositionBatch",
]

__version__ = "0.1.0"
