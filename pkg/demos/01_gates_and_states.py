#!/usr/bin/env python3
"""Tour of the statevector simulator: basis states, gates, measurement.

Index convention used everywhere: qubit 0 is the most significant bit of
the amplitude index, so basis_state(n, bits) puts its 1.0 at int(bits, 2).
"""
import numpy as np

from qnnbench.statevec import (Pauli, apply_exp_pauli_pair, apply_h, apply_phase,
                               apply_x, apply_z, basis_state, expectation_pauli,
                               inner_product)

print("== basis states ==")
state = basis_state(3, "101")
print("basis_state(3, '101') has amplitude 1 at index", np.argmax(np.abs(state.amps)),
      "= 0b101 =", int("101", 2))

print("\n== bit flip (X) and phase flip (Z) truth tables ==")
for bits in ("0", "1"):
    print(f"X|{bits}> ->", apply_x(basis_state(1, bits), 0).amps)
for bits in ("0", "1"):
    print(f"Z|{bits}> ->", apply_z(basis_state(1, bits), 0).amps)

print("\n== Hadamard makes superpositions, twice is the identity ==")
plus = apply_h(basis_state(1, "0"), 0)
print("H|0> =", plus.amps, " (both outcomes equally likely)")
print("H H|0> =", apply_h(plus.copy(), 0).amps)

print("\n== phase shifts move phases, not probabilities ==")
state = apply_h(basis_state(1, "0"), 0)
before = np.abs(state.amps) ** 2
apply_phase(state, 0, np.pi / 2)
print("amplitudes:", state.amps)
print("probabilities unchanged:", np.allclose(before, np.abs(state.amps) ** 2))
print("phase(pi) equals Z:", np.allclose(apply_phase(basis_state(1, "1"), 0, np.pi).amps,
                                         apply_z(basis_state(1, "1"), 0).amps))

print("\n== the parametrized two-qubit gate exp(i*theta * P x P) ==")
state = apply_exp_pauli_pair(basis_state(2, "00"), 0, 1, Pauli.X, np.pi / 2)
print("exp(i pi/2 XX)|00> =", np.round(state.amps, 12), " (= i|11>)")
state = apply_exp_pauli_pair(basis_state(2, "01"), 0, 1, Pauli.Z, np.pi / 4)
print("exp(i pi/4 ZZ)|01> picks up e^{-i pi/4}:", np.round(state.amps[1], 12))

print("\n== measurement as exact expectation values ==")
print("<Z> of |0> =", expectation_pauli(basis_state(1, "0"), 0, Pauli.Z))
print("<Z> of |1> =", expectation_pauli(basis_state(1, "1"), 0, Pauli.Z))
print("<Z> of H|0> =", expectation_pauli(apply_h(basis_state(1, "0"), 0), 0, Pauli.Z))

print("\n== norms survive long random gate strings ==")
rng = np.random.default_rng(0)
state = basis_state(6, "000000")
for _ in range(200):
    q1, q2 = rng.choice(6, size=2, replace=False)
    apply_exp_pauli_pair(state, int(q1), int(q2), list(Pauli)[rng.integers(3)],
                         rng.uniform(-np.pi, np.pi))
print("norm after 200 random two-qubit gates:", state.norm())
print("overlap with the start state:", abs(inner_product(basis_state(6, "000000"), state)))
