"""Parametrized circuit IR and the two-qubit-gate classifier architecture.

A circuit is an ordered gate list over n qubits plus a declared parameter
count.  ``exp_pair`` gates either bind a fixed angle or reference a slot
of the parameter vector; everything else is fixed.  Angles are plain
radians and deliberately not wrapped mod 2*pi.

Sign convention: parametrized gates are exp(+i*theta * P x P) exactly.
Conversions to other conventions (e.g. RPP(phi) = exp(-i*phi/2 * P x P),
which equals an exp_pair at theta = -phi/2) are documented in the README,
not implemented as separate code paths.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv
from .statevec import Pauli, StateVector

KIND_X = "x"
KIND_H = "h"
KIND_Z = "z"
KIND_PHASE = "phase"
KIND_EXP_PAIR = "exp_pair"

_SINGLE_KINDS = (KIND_X, KIND_H, KIND_Z, KIND_PHASE)


@dataclass(frozen=True)
class GateSpec:
    kind: str
    targets: tuple[int, ...]
    pauli: Pauli | None = None
    angle: float | None = None
    slot: int | None = None

    def __post_init__(self):
        if self.kind in _SINGLE_KINDS:
            if len(self.targets) != 1:
                raise ValueError(f"{self.kind} takes exactly one target, got {self.targets}")
            if self.kind == KIND_PHASE and self.angle is None:
                raise ValueError("phase gate needs an angle")
        elif self.kind == KIND_EXP_PAIR:
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError(f"exp_pair takes two distinct targets, got {self.targets}")
            if self.pauli is None:
                raise ValueError("exp_pair needs a pauli kind")
            if (self.angle is None) == (self.slot is None):
                raise ValueError("exp_pair needs exactly one of angle or slot")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


def x(q: int) -> GateSpec:
    return GateSpec(KIND_X, (q,))


def h(q: int) -> GateSpec:
    return GateSpec(KIND_H, (q,))


def z(q: int) -> GateSpec:
    return GateSpec(KIND_Z, (q,))


def phase(q: int, angle: float) -> GateSpec:
    return GateSpec(KIND_PHASE, (q,), angle=float(angle))


def exp_pair(p: Pauli, q1: int, q2: int, slot: int | None = None, angle: float | None = None) -> GateSpec:
    return GateSpec(KIND_EXP_PAIR, (q1, q2), pauli=p,
                    angle=None if angle is None else float(angle), slot=slot)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateSpec, ...]
    n_params: int

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for t in g.targets:
                if not 0 <= t < self.n_qubits:
                    raise ValueError(f"gate target {t} out of range for {self.n_qubits} qubits")
            if g.slot is not None and not 0 <= g.slot < self.n_params:
                raise ValueError(f"parameter slot {g.slot} out of range for {self.n_params} params")


def _check_params(circuit: Circuit, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got shape {params.shape}")
    if not np.all(np.isfinite(params)):
        raise ValueError("parameters must be finite")
    return params


def _gate_angle(gate: GateSpec, params: np.ndarray) -> float:
    return gate.angle if gate.slot is None else float(params[gate.slot])


def apply_gate_rows(amps: np.ndarray, n: int, gate: GateSpec, params: np.ndarray, sign: float = 1.0) -> None:
    """Apply one gate (or its inverse for sign=-1) to a (batch, 2**n) block."""
    if gate.kind == KIND_X:
        sv.x_rows(amps, n, gate.targets[0])
    elif gate.kind == KIND_H:
        sv.h_rows(amps, n, gate.targets[0])
    elif gate.kind == KIND_Z:
        sv.z_rows(amps, n, gate.targets[0])
    elif gate.kind == KIND_PHASE:
        sv.phase_rows(amps, n, gate.targets[0], sign * gate.angle)
    else:
        sv.exp_pair_rows(amps, n, gate.targets[0], gate.targets[1], gate.pauli,
                         sign * _gate_angle(gate, params))


def apply_circuit_rows(amps: np.ndarray, circuit: Circuit, params: np.ndarray) -> None:
    for gate in circuit.gates:
        apply_gate_rows(amps, circuit.n_qubits, gate, params)


def evaluate(circuit: Circuit, params: np.ndarray, input_state: StateVector) -> StateVector:
    """Run the circuit on a copy of the input state."""
    if input_state.n_qubits != circuit.n_qubits:
        raise ValueError(f"input has {input_state.n_qubits} qubits, circuit needs {circuit.n_qubits}")
    params = _check_params(circuit, params)
    out = input_state.copy()
    apply_circuit_rows(out.amps.reshape(1, -1), circuit, params)
    return out


def build_qnn(dim: int) -> tuple[Circuit, int]:
    """The dim*dim-pixel classifier circuit; returns (circuit, readout qubit).

    Data qubits 0..dim*dim-1 follow row-major pixel order and the readout
    is the extra last qubit.  Layout: X and H prepare the readout, one
    XX coupling per data qubit (slots 0..dim*dim-1), one ZZ coupling per
    data qubit (slots dim*dim..2*dim*dim-1), then a closing H on the
    readout.  Parameter count is 2*dim*dim.
    """
    if dim not in (2, 3, 4):
        raise ValueError(f"dim must be 2, 3 or 4, got {dim}")
    n_data = dim * dim
    readout = n_data
    gates = [x(readout), h(readout)]
    gates += [exp_pair(Pauli.X, d, readout, slot=d) for d in range(n_data)]
    gates += [exp_pair(Pauli.Z, d, readout, slot=n_data + d) for d in range(n_data)]
    gates.append(h(readout))
    return Circuit(n_data + 1, tuple(gates), 2 * n_data), readout


def model_expectation(circuit: Circuit, params: np.ndarray, input_state: StateVector,
                      readout: int, observable: Pauli = Pauli.Z) -> float:
    """Readout-observable expectation of the evolved state, in [-1, 1]."""
    out = evaluate(circuit, params, input_state)
    return sv.expectation_pauli(out, readout, observable)


# --- text serialization (one gate per line) --------------------------------
#
#   x 5 | h 5 | z 5 | phase 2 0.7853981633974483
#   exp_pair x 0 5 @3        (slot 3)
#   exp_pair z 0 5 -1.25     (fixed angle)
#
# First line is a header: "circuit <n_qubits> <n_params>".


def to_text(circuit: Circuit) -> str:
    lines = [f"circuit {circuit.n_qubits} {circuit.n_params}"]
    for g in circuit.gates:
        if g.kind == KIND_PHASE:
            lines.append(f"phase {g.targets[0]} {g.angle!r}")
        elif g.kind == KIND_EXP_PAIR:
            tail = f"@{g.slot}" if g.slot is not None else repr(g.angle)
            lines.append(f"exp_pair {g.pauli.value.lower()} {g.targets[0]} {g.targets[1]} {tail}")
        else:
            lines.append(f"{g.kind} {g.targets[0]}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines or not lines[0].startswith("circuit "):
        raise ValueError("missing 'circuit <n_qubits> <n_params>' header")
    _, n_qubits, n_params = lines[0].split()
    gates = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] in (KIND_X, KIND_H, KIND_Z):
            gates.append(GateSpec(parts[0], (int(parts[1]),)))
        elif parts[0] == KIND_PHASE:
            gates.append(phase(int(parts[1]), float(parts[2])))
        elif parts[0] == KIND_EXP_PAIR:
            p = Pauli(parts[1].upper())
            q1, q2 = int(parts[2]), int(parts[3])
            if parts[4].startswith("@"):
                gates.append(exp_pair(p, q1, q2, slot=int(parts[4][1:])))
            else:
                gates.append(exp_pair(p, q1, q2, angle=float(parts[4])))
        else:
            raise ValueError(f"unknown gate line: {ln!r}")
    return Circuit(int(n_qubits), tuple(gates), int(n_params))
