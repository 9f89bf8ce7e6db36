"""Experiment runner: config grid, training loops, metrics persistence.

A run is fully determined by (config, dataset): parameter init, shuffling,
and shot sampling all derive from the config seed.  Wall time is recorded
for context and is the only non-reproducible field of a record.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import qml
from .baseline import build_fair, train_fair
from .circuit import apply_circuit_rows, build_qnn
from .data import DatasetSplit, PipelineError, encode_batch_indices, prepare_split
from .statevec import Pauli, basis_state, expect_rows

MODELS = ("qnn", "fair")
OPTIMIZERS = ("plain", "paper")
GRAD_ENGINES = ("analytic", "finite_diff", "hadamard")
FD_EPS = 1e-5


@dataclass(frozen=True)
class RunConfig:
    model: str
    dim: int
    epochs: int
    batch_size: int = 16
    learning_rate: float = 0.02
    optimizer: str = "plain"
    grad_engine: str = "analytic"
    shots: int = 1000                 # hadamard engine only
    labels: tuple[int, int] = (3, 6)
    seed: int = 0
    dedup: bool = True
    threshold: float = 0.5

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.dim not in (2, 3, 4):
            raise ValueError(f"dim must be 2, 3 or 4, got {self.dim}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.grad_engine not in GRAD_ENGINES:
            raise ValueError(f"grad_engine must be one of {GRAD_ENGINES}, got {self.grad_engine!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.labels[0] == self.labels[1]:
            raise ValueError("class labels must differ")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        object.__setattr__(self, "labels", tuple(self.labels))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["labels"] = tuple(d.get("labels", (3, 6)))
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)


@dataclass
class RunRecord:
    config: RunConfig
    per_epoch: list[tuple[float, float]]  # (mean train loss, test accuracy)
    wall_time: float
    provenance: dict[str, int]
    error: str | None = None

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(),
                "per_epoch": [list(e) for e in self.per_epoch],
                "wall_time": self.wall_time,
                "provenance": self.provenance,
                "error": self.error}

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(RunConfig.from_dict(d["config"]),
                   [tuple(e) for e in d["per_epoch"]],
                   d["wall_time"], d["provenance"], d.get("error"))

    def final_accuracy(self) -> float:
        return self.per_epoch[-1][1]


def accuracy(outputs, labels) -> float:
    """Fraction of sign matches; an exact-zero output never matches."""
    outputs = np.asarray(outputs, dtype=np.float64)
    labels = np.asarray(labels)
    if len(outputs) == 0 or len(outputs) != len(labels):
        raise ValueError("outputs and labels must be equal-length and nonempty")
    return float(np.mean(np.sign(outputs) == labels))


def _weighted_accuracy(outputs: np.ndarray, labels: np.ndarray, counts: np.ndarray) -> float:
    return float(np.sum((np.sign(outputs) == labels) * counts) / counts.sum())


def _basis_batch(indices: np.ndarray, n_qubits: int) -> np.ndarray:
    amps = np.zeros((len(indices), 2**n_qubits), dtype=np.complex128)
    amps[np.arange(len(indices)), indices] = 1.0
    return amps


def _eval_chunk(n_qubits: int) -> int:
    # keep evaluation batches near 128 MiB of amplitudes
    return int(min(1024, max(16, (1 << 23) >> n_qubits)))


def _qnn_test_outputs(circ, readout, theta, indices: np.ndarray) -> np.ndarray:
    outs = np.empty(len(indices))
    chunk = _eval_chunk(circ.n_qubits)
    for start in range(0, len(indices), chunk):
        amps = _basis_batch(indices[start:start + chunk], circ.n_qubits)
        apply_circuit_rows(amps, circ, theta)
        outs[start:start + chunk] = expect_rows(amps, circ.n_qubits, readout, Pauli.Z)
    return outs


def _minibatch_loss(circ, readout, theta, indices, labels) -> float:
    amps = _basis_batch(indices, circ.n_qubits)
    apply_circuit_rows(amps, circ, theta)
    e = expect_rows(amps, circ.n_qubits, readout, Pauli.Z)
    return float(np.mean(1.0 - labels * e))


def _minibatch_grad(config: RunConfig, circ, readout, theta, indices, labels,
                    rng: np.random.Generator) -> tuple[np.ndarray, float]:
    if config.grad_engine == "analytic":
        amps = _basis_batch(indices, circ.n_qubits)
        return qml.minibatch_grad_loss(circ, theta, amps, labels, readout)
    if config.grad_engine == "finite_diff":
        grad = np.zeros(circ.n_params)
        for i in range(circ.n_params):
            stepped = theta.copy()
            stepped[i] = theta[i] + FD_EPS
            up = _minibatch_loss(circ, readout, stepped, indices, labels)
            stepped[i] = theta[i] - FD_EPS
            down = _minibatch_loss(circ, readout, stepped, indices, labels)
            grad[i] = (up - down) / (2.0 * FD_EPS)
        return grad, _minibatch_loss(circ, readout, theta, indices, labels)
    # hadamard: shot-sampled estimate per sample and component
    grad = np.zeros(circ.n_params)
    for idx, label in zip(indices, labels):
        sample = qml.LabeledState(basis_state(circ.n_qubits, format(idx, f"0{circ.n_qubits}b")), int(label))
        for k in range(circ.n_params):
            seed = int(rng.integers(0, 2**63))
            grad[k] += qml.grad_hadamard_test(circ, theta, sample, k, config.shots, seed, readout)
    grad /= len(indices)
    return grad, _minibatch_loss(circ, readout, theta, indices, labels)


def _train_qnn(config: RunConfig, split: DatasetSplit) -> list[tuple[float, float]]:
    circ, readout = build_qnn(config.dim)
    rng = np.random.default_rng(config.seed)
    theta = qml.init_params(circ.n_params, rng)

    train_idx = encode_batch_indices(split.train_bits)
    train_labels = split.train_labels.astype(np.float64)
    test_idx_all = encode_batch_indices(split.test_bits)
    # evaluation on unique patterns weighted by multiplicity gives the same
    # accuracy as a per-image pass at a fraction of the cost
    uniq_idx, inverse = np.unique(test_idx_all, return_inverse=True)
    uniq_labels = np.zeros((len(uniq_idx), 2), dtype=np.int64)
    np.add.at(uniq_labels, (inverse, (split.test_labels == 1).astype(int)), 1)

    per_epoch = []
    n = len(train_idx)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start:start + config.batch_size]
            grad, loss = _minibatch_grad(config, circ, readout, theta,
                                         train_idx[batch], train_labels[batch], rng)
            loss_sum += loss * len(batch)
            if config.optimizer == "plain":
                theta = qml.sgd_step_plain(theta, grad, config.learning_rate)
            else:
                theta = qml.sgd_step_paper(theta, grad, loss, config.learning_rate)
        outs = _qnn_test_outputs(circ, readout, theta, uniq_idx)
        correct = np.where(np.sign(outs) == 1, uniq_labels[:, 1], 0) \
            + np.where(np.sign(outs) == -1, uniq_labels[:, 0], 0)
        per_epoch.append((loss_sum / n, float(correct.sum() / uniq_labels.sum())))
    return per_epoch


def run_experiment(config: RunConfig, data_path: str | Path,
                   split: DatasetSplit | None = None) -> RunRecord:
    """Full pipeline for one configuration; pass a prepared split to reuse it."""
    t0 = time.perf_counter()
    if split is None:
        split = prepare_split(data_path, config.dim, config.threshold, config.labels, config.dedup)
    try:
        if len(split.train_labels) == 0 or len(split.test_labels) == 0:
            raise ValueError("empty train or test set after preprocessing")
        if config.model == "qnn":
            per_epoch = _train_qnn(config, split)
        else:
            net = build_fair(config.dim, seed=config.seed)
            _, per_epoch = train_fair(net, split, config.epochs, config.batch_size,
                                      config.learning_rate, config.seed)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("train", exc) from exc
    return RunRecord(config, per_epoch, time.perf_counter() - t0, dict(split.provenance))


def default_grid(seeds=(1, 2, 3)) -> list[RunConfig]:
    """Both models x dims {2,3,4} x batch {16,32} x epochs {3,10}, per seed."""
    grid = []
    for model in MODELS:
        for dim in (2, 3, 4):
            for batch in (16, 32):
                for epochs in (3, 10):
                    for seed in seeds:
                        grid.append(RunConfig(model=model, dim=dim, epochs=epochs,
                                              batch_size=batch, seed=seed))
    return grid


def sweep(grid: list[RunConfig], data_path: str | Path, out_path: str | Path) -> list[RunRecord]:
    """Run every config, appending each record to records.jsonl as it lands.

    Failures become error records and the sweep continues; an interrupted
    sweep leaves the lines written so far intact.
    """
    if not grid:
        raise ValueError("sweep needs a nonempty config grid")
    out_dir = Path(out_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_file = out_dir / "records.jsonl"

    splits: dict[tuple, DatasetSplit] = {}
    records = []
    with open(records_file, "a") as fh:
        for config in grid:
            key = (config.dim, config.threshold, config.labels, config.dedup)
            try:
                if key not in splits:
                    splits[key] = prepare_split(data_path, config.dim, config.threshold,
                                                config.labels, config.dedup)
                record = run_experiment(config, data_path, split=splits[key])
            except Exception as exc:
                record = RunRecord(config, [], 0.0, {}, error=str(exc))
            records.append(record)
            fh.write(json.dumps(record.to_dict()) + "\n")
            fh.flush()
    return records


def read_records(path: str | Path) -> list[RunRecord]:
    """Load records from a sweep directory or a records.jsonl file."""
    path = Path(path)
    if path.is_dir():
        path = path / "records.jsonl"
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(RunRecord.from_dict(json.loads(line)))
    return records


_SORT_KEY = ("model", "dim", "batch_size", "epochs")


def _cells(records: list[RunRecord]) -> dict[tuple, list[float]]:
    """Final accuracies grouped over seeds by (model, dim, epochs, batch)."""
    cells: dict[tuple, list[float]] = {}
    for rec in records:
        if rec.error is not None or not rec.per_epoch:
            continue
        key = (rec.config.model, rec.config.dim, rec.config.epochs, rec.config.batch_size)
        cells.setdefault(key, []).append(rec.final_accuracy())
    return cells


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit_report(records: list[RunRecord], out_path: str | Path) -> dict[str, Path]:
    """Write the per-epoch CSV, config sidecar, and pivot tables."""
    if not records:
        raise ValueError("no records to report")
    out_dir = Path(out_path)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {out_dir}: {exc}") from exc
    paths = {}

    def sort_key(rec: RunRecord):
        c = rec.config
        return (c.model, c.dim, c.batch_size, c.epochs, c.seed)

    rows = []
    for rec in sorted(records, key=sort_key):
        c = rec.config
        base = [c.model, c.dim, c.epochs, c.batch_size, c.learning_rate, c.optimizer,
                c.grad_engine, c.labels[0], c.labels[1], c.seed, int(c.dedup), c.threshold]
        if rec.error is not None:
            continue
        for epoch, (loss, acc) in enumerate(rec.per_epoch, start=1):
            rows.append(base + [epoch, f"{loss:.10g}", f"{acc:.10g}", f"{rec.wall_time:.3f}"])
    header = ["model", "dim", "epochs", "batch_size", "learning_rate", "optimizer",
              "grad_engine", "label_a", "label_b", "seed", "dedup", "threshold",
              "epoch", "train_loss", "test_accuracy", "wall_time_s"]
    paths["runs"] = out_dir / "runs.csv"
    _write_csv(paths["runs"], header, rows)

    paths["configs"] = out_dir / "configs.json"
    paths["configs"].write_text(json.dumps([r.to_dict() for r in records], indent=2))

    cells = _cells(records)
    mean = {k: float(np.mean(v)) for k, v in cells.items()}

    rows = [[m, e, b, d, f"{mean[(m, d, e, b)]:.4f}", len(cells[(m, d, e, b)])]
            for (m, d, e, b) in sorted(mean)]
    rows.sort(key=lambda r: (r[0], int(r[1]), int(r[2]), int(r[3])))
    paths["accuracy_vs_dim"] = out_dir / "accuracy_vs_dim.csv"
    _write_csv(paths["accuracy_vs_dim"], ["model", "epochs", "batch_size", "dim", "mean_accuracy", "n_seeds"], rows)

    batch_rows = []
    for (m, d, e, b), acc in sorted(mean.items()):
        batch_rows.append([m, d, e, b, f"{acc:.4f}"])
    batch_rows.sort(key=lambda r: (r[0], int(r[1]), int(r[3]), int(r[2])))
    paths["accuracy_vs_batch"] = out_dir / "accuracy_vs_batch.csv"
    _write_csv(paths["accuracy_vs_batch"], ["model", "dim", "epochs", "batch_size", "mean_accuracy"], batch_rows)

    versus = []
    for (m, d, e, b), acc in mean.items():
        if m != "qnn":
            continue
        fair_key = ("fair", d, e, b)
        if fair_key in mean:
            versus.append([d, e, b, f"{acc:.4f}", f"{mean[fair_key]:.4f}", f"{mean[fair_key] - acc:+.4f}"])
    versus.sort(key=lambda r: (int(r[0]), int(r[2]), int(r[1])))
    paths["qnn_vs_fair"] = out_dir / "qnn_vs_fair.csv"
    _write_csv(paths["qnn_vs_fair"], ["dim", "epochs", "batch_size", "qnn_accuracy",
                                      "fair_accuracy", "fair_minus_qnn"], versus)

    best = [[d, b, e, f"{acc:.4f}"] for (m, d, e, b), acc in mean.items() if m == "qnn"]
    best.sort(key=lambda r: (-float(r[3]), int(r[0]), int(r[1]), int(r[2])))
    paths["best_qnn"] = out_dir / "best_qnn.csv"
    _write_csv(paths["best_qnn"], ["dim", "batch_size", "epochs", "mean_accuracy"], best)

    return paths
