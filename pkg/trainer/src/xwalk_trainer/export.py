"""TorchScript export plus the metadata sidecar the inference adapter reads.

The archive embeds its input size as an extra file so the adapter can
reject a sidecar that disagrees with what the model was traced for. The
sidecar itself carries exactly input_w, input_h, mean, std.
"""
from __future__ import annotations

import logging
from pathlib import Path

import torch

from .errors import ExportError
from .train import TrainConfig

log = logging.getLogger("xwalk_trainer.export")

INPUT_SIZE_EXTRA = "input_size.txt"
ROUND_TRIP_TOLERANCE = 1e-4


def export_model(model: torch.nn.Module, config: TrainConfig, path,
                 metadata_path=None, check_inputs: int = 20) -> float:
    """Trace, save, and self-check the exported classifier.

    Returns the largest per-class probability difference between the
    in-framework model and the reloaded archive over `check_inputs`
    random inputs; raises ExportError if it exceeds 1e-4.
    """
    path = Path(path)
    if metadata_path is None:
        metadata_path = Path(str(path) + ".meta")
    size = config.input_size
    model.eval()
    example = torch.zeros(1, 3, size, size)
    try:
        scripted = torch.jit.trace(model, example)
        torch.jit.save(scripted, str(path),
                       _extra_files={INPUT_SIZE_EXTRA: f"{size}x{size}"})
    except Exception as exc:
        raise ExportError(f"tracing/saving failed: {exc}") from exc

    write_metadata(metadata_path, size, size, config.mean, config.std)

    reloaded = torch.jit.load(str(path))
    reloaded.eval()
    torch.manual_seed(0)
    worst = 0.0
    with torch.no_grad():
        for _ in range(check_inputs):
            x = torch.rand(1, 3, size, size) * 2.0 - 1.0
            a = torch.softmax(model(x), dim=1)
            b = torch.softmax(reloaded(x), dim=1)
            worst = max(worst, float((a - b).abs().max()))
    if worst > ROUND_TRIP_TOLERANCE:
        raise ExportError(
            f"round-trip disagreement {worst:g} exceeds {ROUND_TRIP_TOLERANCE:g}"
        )
    log.info("exported %s (round-trip max diff %g)", path, worst)
    return worst


def write_metadata(path, width: int, height: int, mean, std) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"input_w = {width}\n")
        fh.write(f"input_h = {height}\n")
        fh.write(f"mean = {','.join(repr(float(v)) for v in mean)}\n")
        fh.write(f"std = {','.join(repr(float(v)) for v in std)}\n")
