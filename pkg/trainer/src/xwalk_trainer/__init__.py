"""xwalk-trainer: fine-tunes the crosswalk frame classifier and exports it
for the runtime package, together with a hyperparameter grid search.
"""
from .data import CLASS_NAMES, FrameDataset, load_dataset, prepare_image, stratified_split
from .errors import DatasetError, ExportError, TrainerError, ValidationError
from .export import export_model, write_metadata
from .grid import GridRow, expand_grid, hparam_grid, write_grid_csv
from .train import (
    BATCH_SIZE_GRID,
    EPOCHS_GRID,
    LEARNING_RATE_GRID,
    TrainConfig,
    TrainResult,
    backbone_state,
    build_model,
    fine_tune,
    write_curves_csv,
)

__version__ = "0.1.0"
