"""Image decoding and model-input preparation.

The pipeline is center-crop to square, then scale to the target size,
then per-channel normalization of [0, 1] pixel values. uint8 rasters are
mapped to [0, 1] by dividing by 255; float rasters are assumed to already
be in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DecodeError, ValidationError

_RESAMPLE_FILTERS = {
    "nearest": Image.Resampling.NEAREST,
    "bilinear": Image.Resampling.BILINEAR,
    "bicubic": Image.Resampling.BICUBIC,
}


@dataclass(frozen=True)
class PreprocessSpec:
    """Target geometry and normalization for model input."""

    width: int = 100
    height: int = 100
    resample: str = "bilinear"
    mean: tuple[float, float, float] = (0.5, 0.5, 0.5)
    std: tuple[float, float, float] = (0.5, 0.5, 0.5)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValidationError(
                f"target dimensions must be >= 1, got {self.width}x{self.height}"
            )
        if self.resample not in _RESAMPLE_FILTERS:
            raise ValidationError(
                f"unknown resampling method {self.resample!r} "
                f"(expected one of {sorted(_RESAMPLE_FILTERS)})"
            )
        mean = tuple(float(v) for v in self.mean)
        std = tuple(float(v) for v in self.std)
        if len(mean) != 3 or len(std) != 3:
            raise ValidationError("mean and std must each have 3 entries")
        if any(s <= 0.0 for s in std):
            raise ValidationError(f"normalization std must be > 0, got {std}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)


def load_image(path) -> np.ndarray:
    """Decode an image file into an RGB uint8 array of shape (H, W, 3)."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc
    if arr.size == 0:
        raise ValidationError(f"image {path} has zero size")
    return arr


def preprocess(image: np.ndarray, spec: PreprocessSpec | None = None) -> np.ndarray:
    """Convert an RGB raster to a normalized float32 array of shape (3, H, W).

    Args:
        image: (H, W, 3) array, uint8 or float in [0, 1].
        spec: geometry and normalization; defaults to PreprocessSpec().

    The transform is deterministic and idempotent on inputs that already
    match the target geometry when normalization is the identity.
    """
    if spec is None:
        spec = PreprocessSpec()
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(f"expected an (H, W, 3) RGB raster, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValidationError("image has zero size")

    arr = _crop_and_scale(arr, spec)
    if arr.dtype == np.uint8:
        arr = arr.astype(np.float32) / 255.0
    else:
        arr = arr.astype(np.float32)

    mean = np.asarray(spec.mean, dtype=np.float32)
    std = np.asarray(spec.std, dtype=np.float32)
    arr = (arr - mean) / std
    return np.ascontiguousarray(arr.transpose(2, 0, 1))


def _crop_and_scale(arr: np.ndarray, spec: PreprocessSpec) -> np.ndarray:
    h, w = arr.shape[:2]
    side = min(h, w)
    if h != w:
        top = (h - side) // 2
        left = (w - side) // 2
        arr = arr[top : top + side, left : left + side]
    if arr.shape[0] == spec.height and arr.shape[1] == spec.width:
        return arr
    if arr.dtype == np.uint8:
        img = Image.fromarray(arr, mode="RGB")
        img = img.resize((spec.width, spec.height), _RESAMPLE_FILTERS[spec.resample])
        return np.asarray(img, dtype=np.uint8)
    # Float input: resize each channel in 32-bit float mode.
    channels = []
    for c in range(3):
        img = Image.fromarray(arr[:, :, c].astype(np.float32), mode="F")
        img = img.resize((spec.width, spec.height), _RESAMPLE_FILTERS[spec.resample])
        channels.append(np.asarray(img, dtype=np.float32))
    return np.stack(channels, axis=2)
