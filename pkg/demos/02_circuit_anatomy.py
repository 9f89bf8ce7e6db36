#!/usr/bin/env python3
"""Anatomy of the classifier circuit: layout, parameters, serialization."""
import numpy as np

from qnnbench.circuit import build_qnn, evaluate, model_expectation, to_text
from qnnbench.data import encode_to_input_state
from qnnbench.qml import init_params

print("== the circuit family ==")
for dim in (2, 3, 4):
    circ, readout = build_qnn(dim)
    print(f"dim={dim}: {circ.n_qubits} qubits ({dim*dim} data + readout {readout}), "
          f"{len(circ.gates)} gates, {circ.n_params} parameters")

print("\n== dim=2 circuit, one gate per line ==")
circ, readout = build_qnn(2)
print(to_text(circ), end="")
print("(X,H prepare the readout; one XX and one ZZ coupling per pixel; final H)")

print("\n== a 2x2 image becomes a basis state, then a prediction ==")
bits = np.array([[1, 0], [0, 1]], dtype=np.uint8)
state = encode_to_input_state(bits)
print("pixels:\n", bits)
print("encoded basis index:", int(np.argmax(np.abs(state.amps))), "= 0b10011")

rng = np.random.default_rng(42)
theta = init_params(circ.n_params, rng)
out = evaluate(circ, theta, state)
print("evolved state norm:", out.norm())
print("readout expectation:", model_expectation(circ, theta, state, readout))

print("\n== with all angles zero the model is blind ==")
theta0 = np.zeros(circ.n_params)
vals = {f"{z:04b}": model_expectation(circ, theta0, encode_to_input_state(
    np.array([int(c) for c in f"{z:04b}"]).reshape(2, 2)), readout) for z in range(4)}
print("expectations at theta=0:", vals, "(the two Hadamards cancel, leaving a bare X)")
