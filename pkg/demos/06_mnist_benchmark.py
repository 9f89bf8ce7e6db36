#!/usr/bin/env python3
"""Small real-data benchmark: 3 vs 6 at two input resolutions.

Needs the four MNIST IDX files locally (see the README's data section);
point QNN_BENCH_MNIST at the directory or use ./data.  For the full
hyperparameter grid use the CLI instead:

    qnn-bench sweep --grid default --data data --out results
    qnn-bench report --in results --out results
"""
import os
import sys
from pathlib import Path

from qnnbench.data import prepare_split, provenance_summary
from qnnbench.harness import RunConfig, emit_report, run_experiment

root = Path(os.environ.get("QNN_BENCH_MNIST", "data"))
if not any(root.glob("train-images-idx3-ubyte*")):
    print(f"MNIST IDX files not found under {root}/")
    print("Fetch them (see README 'Getting the data') and rerun, e.g.:")
    print("  mkdir -p data && cd data && curl -LO https://ossci-datasets.s3.amazonaws.com/mnist/train-images-idx3-ubyte.gz  # etc")
    sys.exit(1)

print("== preprocessing ==")
split = prepare_split(root, dim=3)
print(provenance_summary(split))

records = []
for dim in (2, 3):
    for model in ("qnn", "fair"):
        config = RunConfig(model=model, dim=dim, epochs=3, batch_size=16, seed=1)
        print(f"== {model}, {dim}x{dim}, 3 epochs, batch 16 ==")
        record = run_experiment(config, root)
        for epoch, (loss, acc) in enumerate(record.per_epoch, start=1):
            print(f"  epoch {epoch}: train_loss={loss:.4f} test_accuracy={acc:.4f}")
        print(f"  wall time {record.wall_time:.1f}s")
        records.append(record)

out = Path("results_demo")
paths = emit_report(records, out)
print("\nreport tables written:")
for name, path in sorted(paths.items()):
    print(f"  {name}: {path}")
print("\n(4x4 inputs run the 17-qubit simulator; expect minutes per epoch -- "
      "use the CLI sweep for the full grid)")
