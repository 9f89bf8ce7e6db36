"""Shared fixtures: a synthetic IDX dataset and the optional real-MNIST path."""
from __future__ import annotations

import gzip
import os
import struct
from pathlib import Path

import numpy as np
import pytest

from qnnbench.data import TEST_IMAGES, TEST_LABELS, TRAIN_IMAGES, TRAIN_LABELS


def make_bar_images(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two synthetic digit classes: 3 -> vertical left bar, 6 -> horizontal
    top bar, with jittered geometry and background speckle.

    The binarized grids of the two classes are never bit complements of each
    other, which matters: the readout circuit computes only even-parity
    features of the grid and cannot split complementary patterns.
    """
    labels = rng.choice([3, 6], size=n)
    imgs = np.zeros((n, 28, 28), dtype=np.uint8)
    for i, lab in enumerate(labels):
        img = rng.integers(0, 110, size=(28, 28))
        off = rng.integers(0, 5)
        thick = rng.integers(8, 13)
        length = rng.integers(20, 28)
        if lab == 3:
            img[28 - length:, off:off + thick] = rng.integers(150, 255, size=(length, thick))
        else:
            img[off:off + thick, 28 - length:] = rng.integers(150, 255, size=(thick, length))
        imgs[i] = np.clip(img, 0, 255)
    return imgs, labels.astype(np.uint8)


def write_idx_dataset(root: Path, train: tuple[np.ndarray, np.ndarray],
                      test: tuple[np.ndarray, np.ndarray], gzip_labels: bool = True) -> None:
    """Write (images, labels) pairs in IDX format; label files optionally gzipped."""
    root.mkdir(parents=True, exist_ok=True)
    for (imgs, labels), img_stem, lab_stem in ((train, TRAIN_IMAGES, TRAIN_LABELS),
                                               (test, TEST_IMAGES, TEST_LABELS)):
        blob = struct.pack(">IIII", 0x803, len(imgs), 28, 28) + imgs.tobytes()
        (root / img_stem).write_bytes(blob)
        lblob = struct.pack(">II", 0x801, len(labels)) + labels.tobytes()
        if gzip_labels:
            (root / f"{lab_stem}.gz").write_bytes(gzip.compress(lblob))
        else:
            (root / lab_stem).write_bytes(lblob)


@pytest.fixture(scope="session")
def synth_data_dir(tmp_path_factory) -> Path:
    rng = np.random.default_rng(5)
    root = tmp_path_factory.mktemp("synth_idx")
    write_idx_dataset(root, make_bar_images(400, rng), make_bar_images(160, rng))
    return root


def find_mnist_dir() -> Path | None:
    """Locate the real MNIST IDX files via QNN_BENCH_MNIST or ./data."""
    candidates = []
    env = os.environ.get("QNN_BENCH_MNIST")
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for root in candidates:
        if all(any((root / f"{stem}{ext}").exists() for ext in ("", ".gz"))
               for stem in (TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS)):
            return root
    return None


@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    root = find_mnist_dir()
    if root is None:
        pytest.skip("real MNIST IDX files not found: set QNN_BENCH_MNIST or place "
                    "the four files under ./data (see README)")
    return root
