"""Dense-matrix brute-force oracles, independent of the package kernels.

Everything here builds full 2^n x 2^n operators with numpy/scipy and
applies them by matrix multiplication; qubit 0 is the leftmost Kronecker
factor, matching the package's index convention.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from qnnbench.circuit import (Circuit, GateSpec, KIND_EXP_PAIR, KIND_H, KIND_PHASE,
                              KIND_X, KIND_Z)
from qnnbench.statevec import Pauli

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_MAT = {Pauli.X: X, Pauli.Y: Y, Pauli.Z: Z}


def phase_mat(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


def op_on(n: int, q: int, mat: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for i in range(n):
        out = np.kron(out, mat if i == q else I2)
    return out


def pair_op(n: int, q1: int, q2: int, p: Pauli) -> np.ndarray:
    return op_on(n, q1, PAULI_MAT[p]) @ op_on(n, q2, PAULI_MAT[p])


def exp_pair_mat(n: int, q1: int, q2: int, p: Pauli, theta: float) -> np.ndarray:
    return expm(1j * theta * pair_op(n, q1, q2, p))


def gate_matrix(n: int, gate: GateSpec, params: np.ndarray | None = None) -> np.ndarray:
    if gate.kind == KIND_X:
        return op_on(n, gate.targets[0], X)
    if gate.kind == KIND_H:
        return op_on(n, gate.targets[0], H)
    if gate.kind == KIND_Z:
        return op_on(n, gate.targets[0], Z)
    if gate.kind == KIND_PHASE:
        return op_on(n, gate.targets[0], phase_mat(gate.angle))
    assert gate.kind == KIND_EXP_PAIR
    theta = gate.angle if gate.slot is None else float(params[gate.slot])
    return exp_pair_mat(n, gate.targets[0], gate.targets[1], gate.pauli, theta)


def circuit_matrix(circuit: Circuit, params: np.ndarray | None = None) -> np.ndarray:
    u = np.eye(2**circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        u = gate_matrix(circuit.n_qubits, gate, params) @ u
    return u


def expectation(amps: np.ndarray, observable: np.ndarray) -> float:
    val = np.vdot(amps, observable @ amps)
    assert abs(val.imag) < 1e-10
    return float(val.real)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return amps / np.linalg.norm(amps)
