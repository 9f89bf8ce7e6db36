"""Loss, gradient engines, update rules, and superposition batch states.

Gradient sign contract: every ``grad_*`` function returns d(loss)/d(theta),
where loss = 1 - label * expectation.  The label factor is applied
internally; the finite-difference engine is the arbiter for the others.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import statevec as sv
from .circuit import (Circuit, KIND_EXP_PAIR, _check_params, apply_circuit_rows,
                      apply_gate_rows, model_expectation)
from .statevec import Pauli, StateVector

VANISHING_GRAD_SQ = 1e-12


@dataclass
class LabeledState:
    """A computational basis input state with its +1/-1 class label."""
    state: StateVector
    label: int

    def __post_init__(self):
        if self.label not in (+1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label}")
        nonzero = np.flatnonzero(self.state.amps)
        if len(nonzero) != 1 or not np.isclose(abs(self.state.amps[nonzero[0]]), 1.0, atol=1e-12):
            raise ValueError("input state must be a computational basis state")

    @property
    def basis_index(self) -> int:
        return int(np.argmax(np.abs(self.state.amps)))


@dataclass
class SuperpositionBatch:
    """One equal-amplitude state per class, over disjoint basis sets."""
    plus_state: StateVector
    minus_state: StateVector


def _default_readout(circuit: Circuit, readout: int | None) -> int:
    return circuit.n_qubits - 1 if readout is None else readout


def init_params(n_params: int, rng: np.random.Generator) -> np.ndarray:
    """Random initial angles, uniform over [0, 2*pi)."""
    return rng.uniform(0.0, 2.0 * np.pi, size=n_params)


def loss_single(circuit: Circuit, params: np.ndarray, sample: LabeledState,
                readout: int | None = None, observable: Pauli = Pauli.Z) -> float:
    """1 - label * expectation; 0 when perfect, 1 at chance, 2 at worst."""
    r = _default_readout(circuit, readout)
    return 1.0 - sample.label * model_expectation(circuit, params, sample.state, r, observable)


def _grad_expectation_rows(circuit: Circuit, params: np.ndarray, amps: np.ndarray,
                           readout: int, observable: Pauli) -> tuple[np.ndarray, np.ndarray]:
    """Per-row d(expectation)/d(theta) via one forward and one reverse pass.

    Returns (grads with shape (batch, n_params), expectations with shape
    (batch,)).  ``amps`` is consumed as workspace.  For each parametrized
    gate the derivative contribution is -2*imag(<lam|Sigma|psi>) with psi
    the state just after that gate and lam the observable-propagated
    bra side, accumulated into the gate's slot.
    """
    n = circuit.n_qubits
    batch = amps.shape[0]
    apply_circuit_rows(amps, circuit, params)
    expectations = sv.expect_rows(amps, n, readout, observable)

    lam = amps.copy()
    sv.pauli_rows(lam, n, readout, observable)

    grads = np.zeros((batch, circuit.n_params))
    for gate in reversed(circuit.gates):
        if gate.kind == KIND_EXP_PAIR and gate.slot is not None:
            corr = sv.pair_corr_rows(lam, amps, n, gate.targets[0], gate.targets[1], gate.pauli)
            grads[:, gate.slot] += -2.0 * corr.imag
        apply_gate_rows(amps, n, gate, params, sign=-1.0)
        apply_gate_rows(lam, n, gate, params, sign=-1.0)
    return grads, expectations


def minibatch_grad_loss(circuit: Circuit, params: np.ndarray, amps: np.ndarray,
                        labels: np.ndarray, readout: int | None = None,
                        observable: Pauli = Pauli.Z) -> tuple[np.ndarray, float]:
    """Mean loss gradient and mean loss over a (batch, 2**n) block of inputs."""
    params = _check_params(circuit, params)
    r = _default_readout(circuit, readout)
    grads, expectations = _grad_expectation_rows(circuit, params, amps, r, observable)
    labels = np.asarray(labels, dtype=np.float64)
    grad = (-labels[:, None] * grads).mean(axis=0)
    loss = float((1.0 - labels * expectations).mean())
    return grad, loss


def grad_analytic(circuit: Circuit, params: np.ndarray, sample: LabeledState,
                  readout: int | None = None, observable: Pauli = Pauli.Z) -> np.ndarray:
    """Exact loss gradient from the insertion matrix elements."""
    params = _check_params(circuit, params)
    r = _default_readout(circuit, readout)
    amps = sample.state.amps.copy().reshape(1, -1)
    grads, _ = _grad_expectation_rows(circuit, params, amps, r, observable)
    return -sample.label * grads[0]


def grad_finite_diff(circuit: Circuit, params: np.ndarray, sample: LabeledState,
                     eps: float = 1e-5, readout: int | None = None,
                     observable: Pauli = Pauli.Z) -> np.ndarray:
    """Central-difference loss gradient (the test oracle for grad_analytic)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    params = _check_params(circuit, params)
    g = np.zeros(circuit.n_params)
    for i in range(circuit.n_params):
        stepped = params.copy()
        stepped[i] = params[i] + eps
        up = loss_single(circuit, stepped, sample, readout, observable)
        stepped[i] = params[i] - eps
        down = loss_single(circuit, stepped, sample, readout, observable)
        g[i] = (up - down) / (2.0 * eps)
    return g


def _insertion_unitary_rows(circuit: Circuit, params: np.ndarray, amps: np.ndarray,
                            gate_idx: int, readout: int, observable: Pauli) -> None:
    """Apply U^dag O (suffix) Sigma (prefix) to the rows, i.e. the combined
    unitary whose diagonal matrix element carries the gradient component."""
    n = circuit.n_qubits
    for j, gate in enumerate(circuit.gates):
        apply_gate_rows(amps, n, gate, params)
        if j == gate_idx:
            g = circuit.gates[gate_idx]
            sv.pauli_pair_rows(amps, n, g.targets[0], g.targets[1], g.pauli)
    sv.pauli_rows(amps, n, readout, observable)
    for gate in reversed(circuit.gates):
        apply_gate_rows(amps, n, gate, params, sign=-1.0)


def hadamard_test_p0(circuit: Circuit, params: np.ndarray, input_state: StateVector,
                     k: int | None, readout: int | None = None,
                     observable: Pauli = Pauli.Z) -> float:
    """Exact ancilla P(0) for the gradient-estimation interference protocol.

    Prepares input (x) (|0> + |1>)/sqrt(2), applies i*U conditioned on the
    ancilla (U being the insertion unitary for parameter k, or identity
    when k is None), Hadamards the ancilla, and returns the Born
    probability of reading 0: 1/2 - imag(<in|U|in>)/2.

    The two ancilla branches are tracked as separate statevectors; the
    conditioned application touches only the ancilla=1 branch, so no
    controlled-gate machinery is needed.
    """
    params = _check_params(circuit, params)
    r = _default_readout(circuit, readout)
    branch0 = input_state.amps.copy().reshape(1, -1)
    branch1 = input_state.amps.copy().reshape(1, -1)
    if k is not None:
        matches = [j for j, g in enumerate(circuit.gates) if g.slot == k]
        if len(matches) != 1:
            raise ValueError(f"parameter {k} must tag exactly one gate, found {len(matches)}")
        _insertion_unitary_rows(circuit, params, branch1, matches[0], r, observable)
    branch1 *= 1j
    # H on the ancilla: |0> branch becomes (branch0 + branch1)/2 of the
    # pre-Hadamard 1/sqrt(2)-weighted pair
    amp0 = (branch0 + branch1) / 2.0
    return float(np.vdot(amp0, amp0).real)


def grad_hadamard_test(circuit: Circuit, params: np.ndarray, sample: LabeledState,
                       k: int, shots: int, rng_seed: int,
                       readout: int | None = None, observable: Pauli = Pauli.Z) -> float:
    """Shot-sampled estimate of one loss-gradient component.

    Ancilla outcomes are drawn from the exact Born probability, so the
    estimator is binomial: unbiased, with standard error at most
    2/sqrt(shots) before the label factor.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not 0 <= k < circuit.n_params:
        raise ValueError(f"parameter index {k} out of range")
    p0 = hadamard_test_p0(circuit, params, sample.state, k, readout, observable)
    rng = np.random.default_rng(rng_seed)
    p0_hat = rng.binomial(shots, min(1.0, max(0.0, p0))) / shots
    # imag(<in|U|in>) = 1 - 2*P(0); the expectation derivative is -2*imag,
    # and the loss carries -label
    return 2.0 * sample.label * (1.0 - 2.0 * p0_hat)


def sgd_step_paper(params: np.ndarray, grad: np.ndarray, loss: float, r: float) -> np.ndarray:
    """Normalized update theta - r*(loss/|g|^2)*g; skips vanishing gradients."""
    if r <= 0:
        raise ValueError("learning rate must be positive")
    params = np.asarray(params, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    g2 = float(grad @ grad)
    if g2 < VANISHING_GRAD_SQ:
        warnings.warn("vanishing-gradient: update step skipped", stacklevel=2)
        return params.copy()
    return params - r * (loss / g2) * grad


def sgd_step_plain(params: np.ndarray, grad: np.ndarray, r: float) -> np.ndarray:
    """Standard update theta - r*g."""
    if r <= 0:
        raise ValueError("learning rate must be positive")
    return np.asarray(params, dtype=np.float64) - r * np.asarray(grad, dtype=np.float64)


def build_superposition_batch(samples: list[LabeledState]) -> SuperpositionBatch:
    """Equal-amplitude class superpositions with 1/sqrt(class size) weights."""
    if not samples:
        raise ValueError("need at least one sample")
    n = samples[0].state.n_qubits
    by_label: dict[int, list[int]] = {+1: [], -1: []}
    for s in samples:
        if s.state.n_qubits != n:
            raise ValueError("all samples must share a qubit count")
        idx = s.basis_index
        if idx in by_label[s.label]:
            raise ValueError(f"duplicate basis state {idx} in class {s.label:+d}")
        by_label[s.label].append(idx)
    if not by_label[+1] or not by_label[-1]:
        raise ValueError("each class needs at least one sample")

    def superpose(indices: list[int]) -> StateVector:
        amps = np.zeros(2**n, dtype=np.complex128)
        amps[indices] = 1.0 / np.sqrt(len(indices))
        return StateVector(n, amps)

    return SuperpositionBatch(superpose(by_label[+1]), superpose(by_label[-1]))


def loss_batch(circuit: Circuit, params: np.ndarray, batch: SuperpositionBatch,
               readout: int | None = None, observable: Pauli = Pauli.Z) -> float:
    """1 - (e_plus - e_minus)/2 over the two class superposition states."""
    r = _default_readout(circuit, readout)
    e_plus = model_expectation(circuit, params, batch.plus_state, r, observable)
    e_minus = model_expectation(circuit, params, batch.minus_state, r, observable)
    return 1.0 - 0.5 * (e_plus - e_minus)
