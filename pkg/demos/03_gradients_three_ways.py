#!/usr/bin/env python3
"""One loss gradient, three engines: exact, finite differences, shot noise.

The interference-protocol estimator draws ancilla outcomes from the exact
Born probability, so its error shrinks like 1/sqrt(shots) toward the
analytic component.
"""
import numpy as np

from qnnbench.circuit import build_qnn
from qnnbench.qml import (LabeledState, grad_analytic, grad_finite_diff,
                          grad_hadamard_test, hadamard_test_p0, init_params)
from qnnbench.statevec import basis_state

circ, readout = build_qnn(2)
rng = np.random.default_rng(1)
theta = init_params(circ.n_params, rng)
sample = LabeledState(basis_state(5, "01101"), +1)

print("== exact vs finite differences ==")
ga = grad_analytic(circ, theta, sample)
gf = grad_finite_diff(circ, theta, sample, eps=1e-5)
print("analytic:", np.round(ga, 6))
print("finite differences agree to", np.max(np.abs(ga - gf)))

print("\n== the ancilla protocol, exactly ==")
print("P(ancilla=0) for the identity unitary:",
      hadamard_test_p0(circ, theta, sample.state, None), "(exactly 1/2)")
k = 3
p0 = hadamard_test_p0(circ, theta, sample.state, k)
print(f"P(ancilla=0) for component {k}: {p0:.6f}")
print(f"2*label*(1-2*P0) = {2 * sample.label * (1 - 2 * p0):.6f} = analytic {ga[k]:.6f}")

print("\n== convergence with shot budget ==")
print(f"{'shots':>9}  {'estimate':>10}  {'|error|':>9}  {'2/sqrt(shots)':>13}")
for shots in (100, 1_000, 10_000, 100_000, 1_000_000):
    est = grad_hadamard_test(circ, theta, sample, k, shots=shots, rng_seed=7)
    print(f"{shots:>9}  {est:>10.5f}  {abs(est - ga[k]):>9.5f}  {2 / np.sqrt(shots):>13.5f}")

print("\nsame seed, same estimate:",
      grad_hadamard_test(circ, theta, sample, k, shots=1000, rng_seed=7)
      == grad_hadamard_test(circ, theta, sample, k, shots=1000, rng_seed=7))
