"""Dataset loading for the 3-class crosswalk task.

Layout: `<root>/{street,pedestrian,biker}/*.jpg|png|...`. Images are
center-cropped to a square, scaled, mapped to [0, 1], and normalized per
channel — the same convention the runtime inference adapter applies, and
the one recorded in the exported metadata sidecar.

Class indices are fixed: street = 0, pedestrian = 1, biker = 2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .errors import DatasetError, ValidationError

log = logging.getLogger("xwalk_trainer.data")

CLASS_NAMES = ("street", "pedestrian", "biker")
IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".gif", ".tif", ".tiff"}


def prepare_image(path, size: int, mean, std) -> torch.Tensor:
    """Decode and normalize one image to a (3, size, size) float tensor."""
    with Image.open(path) as img:
        rgb = img.convert("RGB")
        w, h = rgb.size
        side = min(w, h)
        if w != h:
            left = (w - side) // 2
            top = (h - side) // 2
            rgb = rgb.crop((left, top, left + side, top + side))
        if side != size:
            rgb = rgb.resize((size, size), Image.Resampling.BILINEAR)
        arr = np.asarray(rgb, dtype=np.float32) / 255.0
    arr = (arr - np.asarray(mean, dtype=np.float32)) / np.asarray(std, dtype=np.float32)
    return torch.from_numpy(arr.transpose(2, 0, 1).copy())


@dataclass
class FrameDataset:
    """All labeled tensors in memory (the datasets here are small)."""

    images: torch.Tensor   # (N, 3, size, size)
    labels: torch.Tensor   # (N,) int64
    paths: list[Path]

    def __len__(self) -> int:
        return len(self.paths)


def load_dataset(root, size: int = 100,
                 mean=(0.5, 0.5, 0.5), std=(0.5, 0.5, 0.5)) -> FrameDataset:
    """Read the class-folder layout; skips non-image files with a warning."""
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset directory not found: {root}")
    tensors, labels, paths = [], [], []
    for index, name in enumerate(CLASS_NAMES):
        folder = root / name
        if not folder.is_dir():
            raise DatasetError(f"missing class folder: {folder}")
        count = 0
        for path in sorted(folder.iterdir()):
            if not path.is_file():
                continue
            if path.suffix.lower() not in IMAGE_SUFFIXES:
                log.warning("skipping non-image file %s", path)
                continue
            try:
                tensors.append(prepare_image(path, size, mean, std))
            except Exception as exc:
                log.warning("skipping unreadable image %s (%s)", path, exc)
                continue
            labels.append(index)
            paths.append(path)
            count += 1
        if count == 0:
            raise DatasetError(f"class folder has no usable images: {folder}")
    return FrameDataset(
        images=torch.stack(tensors),
        labels=torch.tensor(labels, dtype=torch.int64),
        paths=paths,
    )


def stratified_split(dataset: FrameDataset, test_size: int,
                     seed: int = 0) -> tuple[FrameDataset, FrameDataset]:
    """Hold out test_size images, proportionally per class, at least one
    per class when test_size >= the number of classes."""
    if test_size < 0 or test_size >= len(dataset):
        raise ValidationError(
            f"test_size must be in [0, {len(dataset) - 1}], got {test_size}"
        )
    if test_size == 0:
        empty = FrameDataset(images=dataset.images[:0],
                             labels=dataset.labels[:0], paths=[])
        return dataset, empty

    rng = np.random.default_rng(seed)
    class_indices = [
        np.flatnonzero(dataset.labels.numpy() == c) for c in range(len(CLASS_NAMES))
    ]
    quota = [int(round(test_size * len(idx) / len(dataset))) for idx in class_indices]
    if test_size >= len(CLASS_NAMES):
        quota = [max(1, q) for q in quota]
    # Adjust rounding drift against the largest classes first.
    while sum(quota) > test_size:
        quota[int(np.argmax(quota))] -= 1
    while sum(quota) < test_size:
        sizes = [len(idx) - q for idx, q in zip(class_indices, quota)]
        quota[int(np.argmax(sizes))] += 1

    test_mask = np.zeros(len(dataset), dtype=bool)
    for idx, q in zip(class_indices, quota):
        chosen = rng.permutation(idx)[:q]
        test_mask[chosen] = True

    def subset(mask):
        sel = np.flatnonzero(mask)
        return FrameDataset(
            images=dataset.images[sel],
            labels=dataset.labels[sel],
            paths=[dataset.paths[i] for i in sel],
        )

    return subset(~test_mask), subset(test_mask)
