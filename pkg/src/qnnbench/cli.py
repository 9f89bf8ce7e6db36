"""qnn-bench command line: run one experiment, sweep a grid, or report.

Exit codes: 0 success, 1 usage error, 2 data error, 3 run failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .data import CorruptDataError, PipelineError
from .harness import (RunConfig, default_grid, emit_report, read_records,
                      run_experiment, sweep)

USAGE_ERROR = 1
DATA_ERROR = 2
RUN_ERROR = 3

_DATA_STAGES = ("load", "filter", "downsample", "dedup", "encode")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_ERROR)


def _parse_grad(value: str) -> tuple[str, int]:
    if value == "analytic":
        return "analytic", 1000
    if value == "fd":
        return "finite_diff", 1000
    if value.startswith("hadamard:"):
        shots = int(value.split(":", 1)[1])
        if shots < 1:
            raise ValueError("shots must be >= 1")
        return "hadamard", shots
    raise ValueError(f"grad must be analytic, fd, or hadamard:SHOTS, got {value!r}")


def _parse_labels(value: str) -> tuple[int, int]:
    parts = value.split(",")
    if len(parts) != 2:
        raise ValueError("labels must be two digits like 3,6")
    a, b = int(parts[0]), int(parts[1])
    if not (0 <= a <= 9 and 0 <= b <= 9) or a == b:
        raise ValueError("labels must be two distinct digits 0-9")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnn-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and evaluate one configuration")
    run.add_argument("--model", choices=("qnn", "fair"), required=True)
    run.add_argument("--dim", type=int, choices=(2, 3, 4), required=True)
    run.add_argument("--epochs", type=int, default=3)
    run.add_argument("--batch-size", type=int, default=16)
    run.add_argument("--lr", type=float, default=0.02)
    run.add_argument("--optimizer", choices=("plain", "paper"), default="plain")
    run.add_argument("--grad", default="analytic", help="analytic | hadamard:SHOTS | fd")
    run.add_argument("--labels", default="3,6", help="the two digit classes, e.g. 3,6")
    run.add_argument("--threshold", type=float, default=0.5)
    run.add_argument("--no-dedup", action="store_true", help="keep duplicate training grids")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--data", required=True, help="directory holding the IDX files")
    run.add_argument("--out", help="write the run record as JSON here")

    sw = sub.add_parser("sweep", help="run a grid of configurations")
    sw.add_argument("--grid", default="default", help="'default' or a JSON file of configs")
    sw.add_argument("--data", required=True)
    sw.add_argument("--out", required=True, help="directory for records.jsonl")
    sw.add_argument("--seeds", default="1,2,3", help="seeds for the default grid")

    rep = sub.add_parser("report", help="summarize sweep records into CSV tables")
    rep.add_argument("--in", dest="in_path", required=True, help="sweep directory or records.jsonl")
    rep.add_argument("--out", required=True)
    return parser


def _cmd_run(args) -> int:
    try:
        engine, shots = _parse_grad(args.grad)
        labels = _parse_labels(args.labels)
        config = RunConfig(model=args.model, dim=args.dim, epochs=args.epochs,
                           batch_size=args.batch_size, learning_rate=args.lr,
                           optimizer=args.optimizer, grad_engine=engine, shots=shots,
                           labels=labels, seed=args.seed, dedup=not args.no_dedup,
                           threshold=args.threshold)
    except ValueError as exc:
        print(f"qnn-bench: error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    record = run_experiment(config, args.data)
    for epoch, (loss, acc) in enumerate(record.per_epoch, start=1):
        print(f"epoch {epoch}: train_loss={loss:.4f} test_accuracy={acc:.4f}")
    print(f"wall_time={record.wall_time:.1f}s")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(record.to_dict(), indent=2))
        print(f"record written to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    if args.grid == "default":
        seeds = tuple(int(s) for s in args.seeds.split(","))
        grid = default_grid(seeds=seeds)
    else:
        spec = json.loads(Path(args.grid).read_text())
        grid = [RunConfig.from_dict(d) for d in spec]
    records = sweep(grid, args.data, args.out)
    failures = sum(1 for r in records if r.error is not None)
    print(f"{len(records)} runs ({failures} failed) -> {Path(args.out) / 'records.jsonl'}")
    return 0 if failures == 0 else RUN_ERROR


def _cmd_report(args) -> int:
    records = read_records(args.in_path)
    paths = emit_report(records, args.out)
    for name, path in sorted(paths.items()):
        print(f"{name}: {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse --help exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_report(args)
    except (FileNotFoundError, CorruptDataError) as exc:
        print(f"qnn-bench: data error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except PipelineError as exc:
        code = DATA_ERROR if exc.stage in _DATA_STAGES else RUN_ERROR
        print(f"qnn-bench: {exc}", file=sys.stderr)
        return code
    except ValueError as exc:
        print(f"qnn-bench: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as exc:
        print(f"qnn-bench: io error: {exc}", file=sys.stderr)
        return RUN_ERROR


if __name__ == "__main__":
    sys.exit(main())
