"""Per-frame classification: argmax readout, stochastic error model, backends.

Three interchangeable backends produce frame labels:

* ReplayBackend   - echoes labels (optionally scores) from a manifest file.
* ConfusionBackend - corrupts a known true class through a row-stochastic
  error matrix; the workhorse for simulation.
* ModelBackend    - runs a TorchScript model exported with a metadata
  sidecar carrying input size and normalization constants.

Backends are exclusive-use: one in-flight classify() per instance.
decide() and ConfusionModel sampling are safe to call concurrently.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import CLASS_ORDER, FrameClass, Observation, _validate_scores
from .errors import (
    BackendLoadError,
    ClassificationError,
    EndOfStream,
    ValidationError,
)
from .preprocess import PreprocessSpec, load_image, preprocess

MANIFEST_NAME = "manifest.txt"


@dataclass(frozen=True)
class ClassScores:
    """Probability vector over (street, pedestrian, biker)."""

    p_street: float
    p_pedestrian: float
    p_biker: float

    def __post_init__(self) -> None:
        vals = _validate_scores(self.as_tuple())
        object.__setattr__(self, "p_street", vals[0])
        object.__setattr__(self, "p_pedestrian", vals[1])
        object.__setattr__(self, "p_biker", vals[2])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_street, self.p_pedestrian, self.p_biker)


def decide(scores: ClassScores) -> FrameClass:
    """Argmax readout. Exact ties resolve to STREET first, then PEDESTRIAN."""
    vals = scores.as_tuple()
    best = max(vals)
    for cls, v in zip(CLASS_ORDER, vals):
        if v == best:
            return cls
    raise AssertionError("unreachable")


class ConfusionModel:
    """Row-stochastic 3x3 error model.

    matrix[i][j] is the probability that a frame whose true class has
    index i (in CLASS_ORDER) is predicted as class index j.
    """

    _ROW_SUM_TOL = 1e-9

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"confusion matrix must be 3x3, got shape {m.shape}")
        if np.isnan(m).any() or (m < 0.0).any() or (m > 1.0).any():
            raise ValidationError("confusion matrix entries must lie in [0, 1]")
        row_sums = m.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > self._ROW_SUM_TOL:
            raise ValidationError(
                f"confusion matrix rows must sum to 1 within {self._ROW_SUM_TOL}, got {row_sums}"
            )
        self.matrix = m
        self._cum = np.cumsum(m, axis=1)

    @classmethod
    def identity(cls) -> "ConfusionModel":
        return cls(np.eye(3))

    @classmethod
    def with_diagonal(cls, accuracy: float) -> "ConfusionModel":
        """Diagonal `accuracy`, off-diagonal mass split evenly."""
        off = (1.0 - accuracy) / 2.0
        m = np.full((3, 3), off)
        np.fill_diagonal(m, accuracy)
        return cls(m)

    def sample(self, true_class: FrameClass, rng: np.random.Generator) -> FrameClass:
        """Draw one predicted class; consumes one uniform from rng."""
        row = CLASS_ORDER.index(true_class)
        u = rng.random()
        idx = int(np.searchsorted(self._cum[row], u, side="right"))
        return CLASS_ORDER[min(idx, 2)]

    def sample_stream(
        self, true_classes, rng: np.random.Generator
    ) -> list[FrameClass]:
        """Vectorized sample(); consumes one uniform per frame in order."""
        rows = np.fromiter(
            (CLASS_ORDER.index(c) for c in true_classes), dtype=np.intp
        )
        if rows.size == 0:
            return []
        us = rng.random(rows.size)
        idx = (self._cum[rows] <= us[:, None]).sum(axis=1)
        idx = np.minimum(idx, 2)
        return [CLASS_ORDER[i] for i in idx]


def parse_manifest(path) -> list[tuple[str, FrameClass, ClassScores | None]]:
    """Read a replay manifest: one `<frame-id> <class>` record per line.

    `#` starts a comment; blank lines are skipped. A record may carry three
    trailing floats (street, pedestrian, biker scores) for score replay.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 5):
                raise ValidationError(
                    f"{path}:{lineno}: expected '<frame-id> <class>' "
                    f"(optionally followed by 3 scores), got {raw.rstrip()!r}"
                )
            frame_id = parts[0]
            try:
                cls = FrameClass.parse(parts[1])
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            scores = None
            if len(parts) == 5:
                try:
                    triple = tuple(float(v) for v in parts[2:5])
                except ValueError:
                    raise ValidationError(
                        f"{path}:{lineno}: scores must be numeric"
                    ) from None
                scores = ClassScores(*triple)
            records.append((frame_id, cls, scores))
    return records


def _resolve_manifest(source) -> Path | None:
    """Accept a manifest file or a directory that may contain one.

    An existing but empty directory means an empty replay (None).
    """
    p = Path(source)
    if p.is_dir():
        candidate = p / MANIFEST_NAME
        if candidate.is_file():
            return candidate
        if not any(p.iterdir()):
            return None
        raise ValidationError(f"directory {p} has no {MANIFEST_NAME}")
    if not p.is_file():
        raise FileNotFoundError(f"replay source not found: {p}")
    return p


class ReplayBackend:
    """Echoes manifest labels in order; classify() ignores its frame argument."""

    def __init__(self, source) -> None:
        manifest = _resolve_manifest(source)
        self._records = parse_manifest(manifest) if manifest is not None else []
        self._pos = 0

    def __len__(self) -> int:
        return len(self._records) - self._pos

    def classify(self, frame=None) -> tuple[FrameClass, ClassScores | None]:
        if self._pos >= len(self._records):
            raise EndOfStream("replay manifest exhausted")
        _, cls, scores = self._records[self._pos]
        self._pos += 1
        return cls, scores


class ConfusionBackend:
    """Samples a predicted class for each supplied true class."""

    def __init__(self, confusion: ConfusionModel, seed: int = 0) -> None:
        self.confusion = confusion
        self._rng = np.random.default_rng(seed)

    def classify(self, frame: FrameClass) -> tuple[FrameClass, ClassScores | None]:
        if not isinstance(frame, FrameClass):
            raise ValidationError(
                f"confusion backend needs a true FrameClass per frame, got {frame!r}"
            )
        return self.confusion.sample(frame, self._rng), None


class ModelBackend:
    """Runs an exported TorchScript classifier.

    The sidecar metadata file must contain exactly the keys
    input_w, input_h, mean, std. When the archive itself records its
    input size, a disagreement with the sidecar is a load error.
    """

    INPUT_SIZE_EXTRA = "input_size.txt"

    def __init__(self, model_path, metadata_path=None) -> None:
        if metadata_path is None:
            metadata_path = str(model_path) + ".meta"
        meta = read_sidecar(metadata_path)
        self.spec = PreprocessSpec(
            width=meta["input_w"], height=meta["input_h"],
            mean=meta["mean"], std=meta["std"],
        )
        try:
            import torch
        except ImportError as exc:
            raise BackendLoadError(
                "the model backend requires torch (pip install 'xwalk[model]')"
            ) from exc
        self._torch = torch
        if not os.path.isfile(model_path):
            raise BackendLoadError(f"model file not found: {model_path}")
        extra = {self.INPUT_SIZE_EXTRA: ""}
        try:
            self._model = torch.jit.load(str(model_path), map_location="cpu",
                                         _extra_files=extra)
        except Exception as exc:
            raise BackendLoadError(f"cannot load model {model_path}: {exc}") from exc
        self._model.eval()
        declared = extra[self.INPUT_SIZE_EXTRA]
        if declared:
            size = declared.decode() if isinstance(declared, bytes) else declared
            expected = f"{meta['input_h']}x{meta['input_w']}"
            if size.strip() != expected:
                raise BackendLoadError(
                    f"metadata declares input {expected} but the model archive "
                    f"was exported for {size.strip()}"
                )

    def classify(self, frame) -> tuple[FrameClass, ClassScores]:
        """Classify one frame: an (H, W, 3) raster or an image file path."""
        try:
            if isinstance(frame, (str, Path)):
                frame = load_image(frame)
            x = preprocess(frame, self.spec)
            with self._torch.no_grad():
                logits = self._model(self._torch.from_numpy(x[None]))
                probs = self._torch.softmax(logits[0], dim=0).numpy()
        except Exception as exc:
            raise ClassificationError(f"inference failed: {exc}") from exc
        scores = ClassScores(*(float(v) for v in probs))
        return decide(scores), scores


def read_sidecar(path) -> dict:
    """Parse the metadata sidecar (`key = value` lines).

    Requires exactly the keys {input_w, input_h, mean, std}; mean and std
    are comma-separated per-channel triples.
    """
    if not os.path.isfile(path):
        raise BackendLoadError(f"metadata sidecar not found: {path}")
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise BackendLoadError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    expected = {"input_w", "input_h", "mean", "std"}
    if set(entries) != expected:
        raise BackendLoadError(
            f"metadata sidecar must contain exactly the keys {sorted(expected)}, "
            f"got {sorted(entries)}"
        )
    try:
        return {
            "input_w": int(entries["input_w"]),
            "input_h": int(entries["input_h"]),
            "mean": tuple(float(v) for v in entries["mean"].split(",")),
            "std": tuple(float(v) for v in entries["std"].split(",")),
        }
    except ValueError as exc:
        raise BackendLoadError(f"malformed metadata sidecar {path}: {exc}") from exc


def write_sidecar(path, width: int, height: int, mean, std) -> None:
    """Write the metadata sidecar in the format read_sidecar() expects."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"input_w = {width}\n")
        fh.write(f"input_h = {height}\n")
        fh.write(f"mean = {','.join(repr(float(v)) for v in mean)}\n")
        fh.write(f"std = {','.join(repr(float(v)) for v in std)}\n")


def classify_frame(backend, frame, timestamp: float) -> Observation:
    """Run one backend classification and wrap it as a timestamped Observation."""
    cls, scores = backend.classify(frame)
    tup = scores.as_tuple() if scores is not None else None
    return Observation(timestamp=timestamp, frame_class=cls, scores=tup)
