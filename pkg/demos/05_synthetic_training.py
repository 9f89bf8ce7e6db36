#!/usr/bin/env python3
"""Training dynamics on a synthetic task, and a representability trap.

The readout couples to each data qubit through one XX and one ZZ rotation.
Pushed through the algebra, the prediction depends on the input bits only
through even-parity features (products of an even number of +-1 pixels),
so flipping EVERY pixel provably cannot change the prediction.  Two
consequences, both shown here:

  1. labeling by a single pixel over ALL grids is unlearnable (stuck at 50%),
  2. the same labels restricted to a half cube train to 100%.
"""
import numpy as np

from qnnbench.baseline import build_fair, train_fair
from qnnbench.circuit import build_qnn, model_expectation
from qnnbench.data import DatasetSplit, encode_to_input_state
from qnnbench.qml import LabeledState, grad_analytic, init_params, sgd_step_plain
from qnnbench.statevec import basis_state


def grids(pred):
    out = []
    for z in range(16):
        bits = np.array([int(c) for c in format(z, "04b")], dtype=np.uint8)
        if pred(bits):
            out.append((bits.reshape(2, 2), +1 if bits[0] else -1))
    return out


def train_qnn(samples, steps=200, r=0.1, seed=0):
    circ, readout = build_qnn(2)
    rng = np.random.default_rng(seed)
    theta = init_params(circ.n_params, rng)
    labeled = [LabeledState(encode_to_input_state(bits), label) for bits, label in samples]
    for step in range(steps):
        s = labeled[step % len(labeled)]
        theta = sgd_step_plain(theta, grad_analytic(circ, theta, s), r)
    correct = sum(np.sign(model_expectation(circ, theta, s.state, readout)) == s.label
                  for s in labeled)
    return float(correct) / len(labeled)


print("== the trap: label = pixel 0, over all 16 grids ==")
acc = train_qnn(grids(lambda b: True), steps=400)
print(f"training accuracy after 400 steps: {acc:.2f}")
print("antipodal grids share a prediction but carry opposite labels, so 50% is the ceiling")

flip_check, readout = build_qnn(2)
theta = init_params(flip_check.n_params, np.random.default_rng(3))
e = model_expectation(flip_check, theta, basis_state(5, "01101"), readout)
e_flipped = model_expectation(flip_check, theta, basis_state(5, "10011"), readout)
print(f"prediction on 0110 vs its complement 1001: {e:.6f} vs {e_flipped:.6f}")

print("\n== the fix: same labels on the half cube with pixel 1 clamped on ==")
half = grids(lambda b: b[1] == 1)
accs = [train_qnn(half, steps=200, seed=s) for s in range(5)]
print("training accuracy per seed:", accs, "mean:", float(np.mean(accs)))

print("\n== the dense baseline on the same task ==")
bits = np.array([b for b, _ in half], dtype=np.uint8)
labels = np.array([l for _, l in half], dtype=np.int8)
split = DatasetSplit(2, 0.5, 3, 6, True, bits, labels, np.ones(len(labels), np.int64),
                     bits, labels, {})
net = build_fair(2, seed=0)
_, metrics = train_fair(net, split, epochs=25, batch_size=1, r=0.1, seed=0)
print("fair-model accuracy:", metrics[-1][1],
      "(13 parameters, same 1 - label*prediction loss)")
