"""MNIST ingestion and preprocessing.

Pipeline: parse IDX files -> keep two digit classes as +1/-1 -> area-pool
each 28x28 image down to dim x dim and threshold to bits -> collapse
duplicate grids (majority label, ties dropped) -> encode grids as basis
states with the readout qubit appended in |1>.

IDX container layout (big endian):
    images: u32 magic 0x00000803, u32 count, u32 rows, u32 cols, bytes
    labels: u32 magic 0x00000801, u32 count, bytes
Files may be gzip-wrapped; detected by the 1f 8b prefix.

The dataset is read from local files only; fetching the canonical MNIST
files is documented in the README, never done by this package.
"""
from __future__ import annotations

import gzip
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statevec import StateVector, basis_state

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

TRAIN_IMAGES = "train-images-idx3-ubyte"
TRAIN_LABELS = "train-labels-idx1-ubyte"
TEST_IMAGES = "t10k-images-idx3-ubyte"
TEST_LABELS = "t10k-labels-idx1-ubyte"


class CorruptDataError(ValueError):
    """IDX payload disagrees with its header; carries the failing byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class PipelineError(RuntimeError):
    """A preprocessing or run stage failed; names the stage."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage


@dataclass
class RawImages:
    """Grayscale image stack with digit labels."""
    pixels: np.ndarray  # (count, rows, cols) uint8
    labels: np.ndarray  # (count,) uint8


def _read_bytes(path: Path) -> bytes:
    blob = path.read_bytes()
    if blob[:2] == b"\x1f\x8b":
        return gzip.decompress(blob)
    return blob


def _parse_images(blob: bytes, name: str) -> np.ndarray:
    if len(blob) < 16:
        raise CorruptDataError(f"{name}: header truncated", len(blob))
    magic, count, rows, cols = struct.unpack(">IIII", blob[:16])
    if magic != IMAGE_MAGIC:
        raise CorruptDataError(f"{name}: bad image magic {magic:#010x}", 0)
    expected = 16 + count * rows * cols
    if len(blob) < expected:
        raise CorruptDataError(f"{name}: expected {expected} bytes, got {len(blob)}", len(blob))
    return np.frombuffer(blob, dtype=np.uint8, count=count * rows * cols, offset=16).reshape(count, rows, cols)


def _parse_labels(blob: bytes, name: str) -> np.ndarray:
    if len(blob) < 8:
        raise CorruptDataError(f"{name}: header truncated", len(blob))
    magic, count = struct.unpack(">II", blob[:8])
    if magic != LABEL_MAGIC:
        raise CorruptDataError(f"{name}: bad label magic {magic:#010x}", 0)
    if len(blob) < 8 + count:
        raise CorruptDataError(f"{name}: expected {8 + count} bytes, got {len(blob)}", len(blob))
    return np.frombuffer(blob, dtype=np.uint8, count=count, offset=8)


def _find_file(root: Path, stem: str) -> Path:
    for candidate in (root / stem, root / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(f"missing {stem}[.gz] under {root}")


def load_mnist(path: str | Path) -> tuple[RawImages, RawImages]:
    """Parse the four standard IDX files under ``path``."""
    root = Path(path)
    sets = []
    for img_stem, lab_stem in ((TRAIN_IMAGES, TRAIN_LABELS), (TEST_IMAGES, TEST_LABELS)):
        images = _parse_images(_read_bytes(_find_file(root, img_stem)), img_stem)
        labels = _parse_labels(_read_bytes(_find_file(root, lab_stem)), lab_stem)
        if len(images) != len(labels):
            raise CorruptDataError(f"{img_stem}: {len(images)} images vs {len(labels)} labels", 0)
        sets.append(RawImages(images, labels))
    return sets[0], sets[1]


def filter_binary(images: RawImages, label_a: int, label_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep the two chosen digits; label_a becomes +1, label_b becomes -1."""
    if label_a == label_b:
        raise ValueError("the two class digits must differ")
    keep = (images.labels == label_a) | (images.labels == label_b)
    if not np.any(keep):
        raise ValueError(f"no images labeled {label_a} or {label_b}")
    pixels = images.pixels[keep]
    signs = np.where(images.labels[keep] == label_a, 1, -1).astype(np.int8)
    return pixels, signs


def pool_weights(dim: int) -> np.ndarray:
    """Overlap lengths of the area pooling 28 -> dim; rows sum to 28/dim.

    Cell edges land between pixels only when dim divides 28; otherwise
    boundary pixels contribute fractionally by overlap (28 -> 3 needs this).
    Normalization by the cell area happens once in the pooling itself so
    that exact boundary averages (e.g. a checkerboard pooling to exactly
    1/2) survive in floating point.
    """
    edges = np.linspace(0.0, 28.0, dim + 1)
    w = np.zeros((dim, 28))
    for i in range(dim):
        lo, hi = edges[i], edges[i + 1]
        for j in range(28):
            w[i, j] = max(0.0, min(hi, j + 1.0) - max(lo, j))
    return w


def downsample_binarize(image: np.ndarray, dim: int, threshold: float = 0.5) -> np.ndarray:
    """Area-pool one 28x28 image to dim x dim and threshold (strict >) to bits."""
    return downsample_binarize_batch(np.asarray(image)[None], dim, threshold)[0]


def downsample_binarize_batch(pixels: np.ndarray, dim: int, threshold: float = 0.5) -> np.ndarray:
    # 5 is accepted here so the 5x5 preprocessing path exists, but no model
    # or benchmark consumes it
    if dim not in (2, 3, 4, 5):
        raise ValueError(f"dim must be one of 2, 3, 4, 5, got {dim}")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    pixels = np.asarray(pixels)
    if pixels.shape[-2:] != (28, 28):
        raise ValueError(f"expected 28x28 images, got {pixels.shape}")
    w = pool_weights(dim)
    cell_area = (28.0 / dim) ** 2
    pooled = np.einsum("ij,njk,lk->nil", w, pixels.astype(np.float64), w) / (cell_area * 255.0)
    return (pooled > threshold).astype(np.uint8)


def dedup_conflicts(bits: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collapse identical grids to one representative each.

    Mixed-label grids resolve by majority; exact ties are dropped.  Returns
    (grids, labels, multiplicity) in first-occurrence order, multiplicity
    counting the samples behind each kept (grid, label) pair.
    """
    groups: dict[bytes, list] = {}
    order: list[bytes] = []
    for grid, label in zip(bits, labels):
        key = grid.tobytes()
        if key not in groups:
            groups[key] = [grid, 0, 0]
            order.append(key)
        groups[key][1 if label == 1 else 2] += 1
    kept_bits, kept_labels, kept_mult = [], [], []
    for key in order:
        grid, n_plus, n_minus = groups[key]
        if n_plus == n_minus:
            continue
        label = 1 if n_plus > n_minus else -1
        kept_bits.append(grid)
        kept_labels.append(label)
        kept_mult.append(max(n_plus, n_minus))
    if not kept_bits:
        return (np.zeros((0,) + bits.shape[1:], dtype=bits.dtype),
                np.zeros(0, dtype=np.int8), np.zeros(0, dtype=np.int64))
    return np.array(kept_bits), np.array(kept_labels, dtype=np.int8), np.array(kept_mult, dtype=np.int64)


def encode_to_index(bits: np.ndarray) -> int:
    """Basis-state index of a grid: row-major pixel bits, then readout bit 1."""
    flat = np.asarray(bits, dtype=np.uint8).reshape(-1)
    idx = 0
    for b in flat:
        idx = (idx << 1) | int(b)
    return (idx << 1) | 1


def encode_to_input_state(bits: np.ndarray, n_qubits: int | None = None) -> StateVector:
    """Basis state |pixels, 1>: data qubits carry the grid, readout is set."""
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.size + 1
    if n_qubits is not None and n_qubits != n:
        raise ValueError(f"{bits.size} pixels need {n} qubits, caller expected {n_qubits}")
    return basis_state(n, "".join(str(b) for b in bits.reshape(-1)) + "1")


def encode_batch_indices(bits: np.ndarray) -> np.ndarray:
    """Vectorized encode_to_index over a (count, dim, dim) stack."""
    flat = bits.reshape(len(bits), -1).astype(np.int64)
    weights = 1 << np.arange(flat.shape[1], 0, -1)  # readout occupies bit 0
    return flat @ weights + 1


@dataclass
class DatasetSplit:
    """Preprocessed train/test grids with pipeline provenance counts."""
    dim: int
    threshold: float
    label_a: int
    label_b: int
    dedup: bool
    train_bits: np.ndarray         # (n_train, dim, dim) uint8
    train_labels: np.ndarray       # (n_train,) int8, +1/-1
    train_multiplicity: np.ndarray  # (n_train,) int64
    test_bits: np.ndarray
    test_labels: np.ndarray
    provenance: dict[str, int]


def prepare_split(data_path: str | Path, dim: int, threshold: float = 0.5,
                  labels: tuple[int, int] = (3, 6), dedup: bool = True) -> DatasetSplit:
    """Run the full preprocessing pipeline on the IDX files under data_path.

    Test-set conflicts are never removed: evaluation keeps every filtered
    test image, duplicates and contradictions included.
    """
    def stage(name, fn, *args):
        try:
            return fn(*args)
        except Exception as exc:
            raise PipelineError(name, exc) from exc

    train, test = stage("load", load_mnist, data_path)
    provenance = {"train_raw": len(train.labels), "test_raw": len(test.labels)}

    train_px, train_y = stage("filter", filter_binary, train, labels[0], labels[1])
    test_px, test_y = stage("filter", filter_binary, test, labels[0], labels[1])
    provenance["train_filtered"] = len(train_y)
    provenance["test_filtered"] = len(test_y)

    train_bits = stage("downsample", downsample_binarize_batch, train_px, dim, threshold)
    test_bits = stage("downsample", downsample_binarize_batch, test_px, dim, threshold)

    if dedup:
        train_bits, train_y, mult = stage("dedup", dedup_conflicts, train_bits, train_y)
    else:
        mult = np.ones(len(train_y), dtype=np.int64)
    provenance["train_kept"] = len(train_y)

    return DatasetSplit(dim, threshold, labels[0], labels[1], dedup,
                        train_bits, train_y, mult, test_bits, test_y, provenance)


def save_cache(split: DatasetSplit, path: str | Path) -> None:
    """Write the split as an .npz plus a readable provenance sidecar."""
    path = Path(path)
    np.savez_compressed(
        path,
        meta=json.dumps({"dim": split.dim, "threshold": split.threshold,
                         "label_a": split.label_a, "label_b": split.label_b,
                         "dedup": split.dedup, "provenance": split.provenance}),
        train_bits=split.train_bits, train_labels=split.train_labels,
        train_multiplicity=split.train_multiplicity,
        test_bits=split.test_bits, test_labels=split.test_labels)
    summary = path.with_suffix(".provenance.txt")
    summary.write_text(provenance_summary(split))


def load_cache(path: str | Path) -> DatasetSplit:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        return DatasetSplit(meta["dim"], meta["threshold"], meta["label_a"], meta["label_b"],
                            meta["dedup"], z["train_bits"], z["train_labels"],
                            z["train_multiplicity"], z["test_bits"], z["test_labels"],
                            {k: int(v) for k, v in meta["provenance"].items()})


def provenance_summary(split: DatasetSplit) -> str:
    lines = [
        f"classes: {split.label_a} -> +1, {split.label_b} -> -1",
        f"grid: {split.dim}x{split.dim}, threshold {split.threshold}, dedup {'on' if split.dedup else 'off'}",
    ]
    lines += [f"{k}: {v}" for k, v in split.provenance.items()]
    return "\n".join(lines) + "\n"
