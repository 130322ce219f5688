"""Dataset loading and the stratified holdout."""
import logging

import numpy as np
import pytest
import torch
from PIL import Image

from xwalk_trainer import (
    CLASS_NAMES,
    DatasetError,
    ValidationError,
    load_dataset,
    prepare_image,
    stratified_split,
)


def test_class_order_is_fixed():
    assert CLASS_NAMES == ("street", "pedestrian", "biker")


def test_load_toy_dataset(toy_dataset):
    ds = load_dataset(toy_dataset)
    assert len(ds) == 10
    assert ds.images.shape == (10, 3, 100, 100)
    assert ds.labels.tolist() == [0] * 4 + [1] * 3 + [2] * 3


def test_missing_class_folder(tmp_path):
    for name in ("street", "pedestrian"):
        (tmp_path / name).mkdir()
        Image.new("RGB", (8, 8)).save(tmp_path / name / "a.png")
    with pytest.raises(DatasetError, match="biker"):
        load_dataset(tmp_path, size=8)


def test_empty_class_folder(tmp_path):
    for name in CLASS_NAMES:
        (tmp_path / name).mkdir()
    Image.new("RGB", (8, 8)).save(tmp_path / "street" / "a.png")
    Image.new("RGB", (8, 8)).save(tmp_path / "pedestrian" / "b.png")
    with pytest.raises(DatasetError, match="no usable images"):
        load_dataset(tmp_path)


def test_non_image_files_skipped_with_warning(tmp_path, caplog):
    for name in CLASS_NAMES:
        (tmp_path / name).mkdir()
        Image.new("RGB", (8, 8)).save(tmp_path / name / "ok.png")
    (tmp_path / "street" / "notes.txt").write_text("not an image")
    with caplog.at_level(logging.WARNING):
        ds = load_dataset(tmp_path, size=8)
    assert len(ds) == 3
    assert any("skipping" in m for m in caplog.messages)


def test_prepare_image_crops_and_normalizes(tmp_path):
    arr = np.full((30, 60, 3), 128, dtype=np.uint8)
    path = tmp_path / "wide.png"
    Image.fromarray(arr).save(path)
    tensor = prepare_image(path, size=10, mean=(0.5,) * 3, std=(0.5,) * 3)
    assert tensor.shape == (3, 10, 10)
    expected = (128 / 255 - 0.5) / 0.5
    assert torch.allclose(tensor, torch.full_like(tensor, expected), atol=1e-6)


def test_stratified_split_keeps_every_class(toy_dataset):
    ds = load_dataset(toy_dataset)
    train, test = stratified_split(ds, test_size=3, seed=1)
    assert len(train) == 7 and len(test) == 3
    assert sorted(set(test.labels.tolist())) == [0, 1, 2]


def test_zero_test_size(toy_dataset):
    ds = load_dataset(toy_dataset)
    train, test = stratified_split(ds, test_size=0)
    assert len(train) == 10 and len(test) == 0


def test_oversized_test_size_rejected(toy_dataset):
    ds = load_dataset(toy_dataset)
    with pytest.raises(ValidationError):
        stratified_split(ds, test_size=10)
