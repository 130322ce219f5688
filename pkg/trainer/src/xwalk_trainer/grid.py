"""Grid search over learning rate, batch size, and epoch count."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace

from .data import load_dataset
from .errors import ValidationError
from .train import (
    BATCH_SIZE_GRID,
    EPOCHS_GRID,
    LEARNING_RATE_GRID,
    TrainConfig,
    fine_tune,
)

log = logging.getLogger("xwalk_trainer.grid")


@dataclass(frozen=True)
class GridRow:
    learning_rate: float
    batch_size: int
    epochs: int
    test_accuracy: float
    best: bool = False


def expand_grid(learning_rates=LEARNING_RATE_GRID,
                batch_sizes=BATCH_SIZE_GRID,
                epoch_counts=EPOCHS_GRID) -> list[tuple[float, int, int]]:
    """Cartesian product of the three axes, in a stable order."""
    if not learning_rates or not batch_sizes or not epoch_counts:
        raise ValidationError("every grid axis needs at least one value")
    return [
        (lr, batch, epochs)
        for lr in learning_rates
        for batch in batch_sizes
        for epochs in epoch_counts
    ]


def _rank_key(row: GridRow):
    # Best accuracy first; ties prefer the gentler recipe.
    return (-row.test_accuracy, row.learning_rate, row.batch_size, row.epochs)


def hparam_grid(dataset_dir, base_config: TrainConfig | None = None,
                learning_rates=LEARNING_RATE_GRID,
                batch_sizes=BATCH_SIZE_GRID,
                epoch_counts=EPOCHS_GRID) -> list[GridRow]:
    """Train one model per grid point; flags the best row.

    The dataset is loaded once and re-split identically per run, so rows
    differ only in hyperparameters.
    """
    base = base_config or TrainConfig()
    if base.test_size < 1:
        raise ValidationError("grid search needs test_size >= 1")
    combos = expand_grid(learning_rates, batch_sizes, epoch_counts)
    dataset = load_dataset(dataset_dir, size=base.input_size,
                           mean=base.mean, std=base.std)
    rows = []
    for lr, batch, epochs in combos:
        config = replace(base, learning_rate=lr, batch_size=batch, epochs=epochs)
        result, _ = fine_tune(dataset_dir, config, dataset=dataset)
        rows.append(GridRow(lr, batch, epochs, result.test_accuracy))
        log.info("grid point lr=%g batch=%d epochs=%d -> test acc %.4f",
                 lr, batch, epochs, result.test_accuracy)
    best = min(rows, key=_rank_key)
    return [replace(row, best=row is best) for row in rows]


def write_grid_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["learning_rate", "batch_size", "epochs",
                         "test_accuracy", "best"])
        for row in rows:
            writer.writerow([row.learning_rate, row.batch_size, row.epochs,
                             row.test_accuracy, int(row.best)])
