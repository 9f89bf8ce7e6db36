"""Dense statevector simulator: basis states, the gate set, and measurement.

Index convention (fixed for the whole package): qubit 0 is the MOST
significant bit of the amplitude index, so ``basis_state(n, bits)`` places
its single unit amplitude at ``int(bits, 2)``.  The readout qubit of a
model circuit is always the last qubit (index ``n - 1``), i.e. the least
significant index bit.

Gates mutate amplitude arrays in place through stride-partitioned kernels
(O(2**n) per gate) and return the same ``StateVector`` for chaining.
All amplitudes are complex128.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from . import _kernels as k

NORM_CHECK_TOL = 1e-6  # measurement refuses states further from unit norm


class Pauli(Enum):
    X = "X"
    Y = "Y"
    Z = "Z"


class StateVector:
    """2**n complex amplitudes of an n-qubit pure state."""

    __slots__ = ("n_qubits", "amps")

    def __init__(self, n_qubits: int, amps: np.ndarray):
        if amps.shape != (2**n_qubits,):
            raise ValueError(f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape}")
        self.n_qubits = n_qubits
        self.amps = np.ascontiguousarray(amps, dtype=np.complex128)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


def basis_state(n_qubits: int, bits: str) -> StateVector:
    """Computational basis state; ``bits[i]`` is the value of qubit i."""
    if len(bits) != n_qubits:
        raise ValueError(f"bit string length {len(bits)} != n_qubits {n_qubits}")
    if any(c not in "01" for c in bits):
        raise ValueError(f"bit string must contain only 0/1, got {bits!r}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(n_qubits, amps)


def _bitpos(n_qubits: int, q: int) -> int:
    # qubit q occupies index bit n-1-q (qubit 0 = MSB)
    return n_qubits - 1 - q


def _check_qubit(state: StateVector, q: int) -> int:
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} out of range for {state.n_qubits}-qubit state")
    return _bitpos(state.n_qubits, q)


def _rows(state: StateVector) -> np.ndarray:
    return state.amps.reshape(1, -1)


def apply_x(state: StateVector, q: int) -> StateVector:
    """Bit flip on qubit q."""
    k.x_kernel(_rows(state), _check_qubit(state, q))
    return state


def apply_z(state: StateVector, q: int) -> StateVector:
    """Phase flip on qubit q: negates every amplitude with bit q set."""
    k.z_kernel(_rows(state), _check_qubit(state, q))
    return state


def apply_phase(state: StateVector, q: int, phi: float) -> StateVector:
    """Phase shift: multiplies bit-q=1 amplitudes by exp(i*phi)."""
    k.phase_kernel(_rows(state), _check_qubit(state, q), np.exp(1j * phi))
    return state


def apply_h(state: StateVector, q: int) -> StateVector:
    """Hadamard on qubit q."""
    k.h_kernel(_rows(state), _check_qubit(state, q))
    return state


def apply_y(state: StateVector, q: int) -> StateVector:
    """Pauli Y on qubit q (used for observable insertion)."""
    k.y_kernel(_rows(state), _check_qubit(state, q))
    return state


_EXP_PAIR = {Pauli.X: k.exp_xx_kernel, Pauli.Y: k.exp_yy_kernel, Pauli.Z: k.exp_zz_kernel}
_PAULI_PAIR = {Pauli.X: k.pauli_xx_kernel, Pauli.Y: k.pauli_yy_kernel, Pauli.Z: k.pauli_zz_kernel}
_EXPECT = {Pauli.X: k.expect_x_kernel, Pauli.Y: k.expect_y_kernel, Pauli.Z: k.expect_z_kernel}
_CORR = {Pauli.X: k.corr_xx_kernel, Pauli.Y: k.corr_yy_kernel, Pauli.Z: k.corr_zz_kernel}


def apply_exp_pauli_pair(state: StateVector, q1: int, q2: int, p: Pauli, theta: float) -> StateVector:
    """exp(i*theta * P_q1 P_q2): equals cos(theta)*I + i*sin(theta)*(P x P)."""
    if q1 == q2:
        raise ValueError("exp pauli pair needs two distinct qubits")
    m1 = _check_qubit(state, q1)
    m2 = _check_qubit(state, q2)
    _EXP_PAIR[p](_rows(state), max(m1, m2), min(m1, m2), np.cos(theta), np.sin(theta))
    return state


def apply_pauli_pair(state: StateVector, q1: int, q2: int, p: Pauli) -> StateVector:
    """The bare tensor product P_q1 P_q2 (a Hermitian unitary)."""
    if q1 == q2:
        raise ValueError("pauli pair needs two distinct qubits")
    m1 = _check_qubit(state, q1)
    m2 = _check_qubit(state, q2)
    _PAULI_PAIR[p](_rows(state), max(m1, m2), min(m1, m2))
    return state


def expectation_pauli(state: StateVector, q: int, p: Pauli) -> float:
    """<psi|P_q|psi>, a real number clamped to [-1, 1].

    The kernels compute the real form directly, so there is no imaginary
    residue to discard; the clamp still guards float drift at the
    eigenvalue boundary.  Raises on states whose norm has drifted beyond
    NORM_CHECK_TOL.
    """
    m = _check_qubit(state, q)
    nrm = state.norm()
    if abs(nrm - 1.0) > NORM_CHECK_TOL:
        raise ValueError(f"state norm {nrm} deviates from 1 by more than {NORM_CHECK_TOL}")
    out = np.empty(1, dtype=np.float64)
    _EXPECT[p](_rows(state), m, out)
    return float(min(1.0, max(-1.0, out[0])))


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in a."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amps, b.amps))


# Array-level entry points for batched evaluation.  ``amps`` has shape
# (batch, 2**n); the batch axis is partitioned across kernel workers.

def x_rows(amps: np.ndarray, n: int, q: int) -> None:
    k.x_kernel(amps, _bitpos(n, q))


def y_rows(amps: np.ndarray, n: int, q: int) -> None:
    k.y_kernel(amps, _bitpos(n, q))


def z_rows(amps: np.ndarray, n: int, q: int) -> None:
    k.z_kernel(amps, _bitpos(n, q))


def h_rows(amps: np.ndarray, n: int, q: int) -> None:
    k.h_kernel(amps, _bitpos(n, q))


def phase_rows(amps: np.ndarray, n: int, q: int, phi: float) -> None:
    k.phase_kernel(amps, _bitpos(n, q), np.exp(1j * phi))


def exp_pair_rows(amps: np.ndarray, n: int, q1: int, q2: int, p: Pauli, theta: float) -> None:
    m1, m2 = _bitpos(n, q1), _bitpos(n, q2)
    _EXP_PAIR[p](amps, max(m1, m2), min(m1, m2), np.cos(theta), np.sin(theta))


def pauli_pair_rows(amps: np.ndarray, n: int, q1: int, q2: int, p: Pauli) -> None:
    m1, m2 = _bitpos(n, q1), _bitpos(n, q2)
    _PAULI_PAIR[p](amps, max(m1, m2), min(m1, m2))


def pauli_rows(amps: np.ndarray, n: int, q: int, p: Pauli) -> None:
    {Pauli.X: k.x_kernel, Pauli.Y: k.y_kernel, Pauli.Z: k.z_kernel}[p](amps, _bitpos(n, q))


def expect_rows(amps: np.ndarray, n: int, q: int, p: Pauli) -> np.ndarray:
    out = np.empty(amps.shape[0], dtype=np.float64)
    _EXPECT[p](amps, _bitpos(n, q), out)
    return out


def pair_corr_rows(lam: np.ndarray, psi: np.ndarray, n: int, q1: int, q2: int, p: Pauli) -> np.ndarray:
    """Per-row <lam | P_q1 P_q2 | psi> without materialising the product."""
    m1, m2 = _bitpos(n, q1), _bitpos(n, q2)
    out = np.empty(lam.shape[0], dtype=np.complex128)
    _CORR[p](lam, psi, max(m1, m2), min(m1, m2), out)
    return out
