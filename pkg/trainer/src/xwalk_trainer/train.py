"""Head-only fine-tuning of a 22-layer inception-style backbone.

The backbone (GoogLeNet) is kept frozen in eval mode, so its parameters
and batch-norm statistics are bit-identical before and after training;
only the final linear head learns. Because frozen features are
deterministic, they are extracted once and the head trains on the cached
embeddings, which makes small-dataset runs fast. Set
`freeze_backbone=False` for conventional full fine-tuning.

Optimization follows the selected recipe: Adam on cross-entropy loss.
"""
from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field

import torch
from torch import nn

from .data import FrameDataset, load_dataset, stratified_split
from .errors import ValidationError

log = logging.getLogger("xwalk_trainer.train")

NUM_CLASSES = 3

#: Hyperparameter grids this project searched, and the selected values.
LEARNING_RATE_GRID = (0.0001, 0.0005, 0.001, 0.01)
BATCH_SIZE_GRID = (8, 16, 32, 64)
EPOCHS_GRID = (2, 4, 6, 8)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.0005
    batch_size: int = 32
    epochs: int = 4
    test_size: int = 100
    seed: int = 0
    input_size: int = 100
    mean: tuple[float, float, float] = (0.5, 0.5, 0.5)
    std: tuple[float, float, float] = (0.5, 0.5, 0.5)
    pretrained: bool = False
    freeze_backbone: bool = True

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.test_size < 0:
            raise ValidationError(f"test_size must be >= 0, got {self.test_size}")
        if self.input_size < 1:
            raise ValidationError(f"input_size must be >= 1, got {self.input_size}")
        if any(s <= 0 for s in self.std):
            raise ValidationError(f"std entries must be > 0, got {self.std}")


@dataclass
class TrainResult:
    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    test_accuracy: float | None = None
    wall_seconds: float = 0.0

    @property
    def final_train_accuracy(self) -> float:
        return self.train_accuracy[-1] if self.train_accuracy else 0.0


def build_model(config: TrainConfig) -> nn.Module:
    """GoogLeNet with a fresh 3-way head; auxiliary heads removed."""
    from torchvision.models import googlenet

    torch.manual_seed(config.seed)
    if config.pretrained:
        from torchvision.models import GoogLeNet_Weights

        model = googlenet(weights=GoogLeNet_Weights.IMAGENET1K_V1)
        model.aux_logits = False
        model.aux1 = None
        model.aux2 = None
    else:
        model = googlenet(weights=None, aux_logits=False, init_weights=False)
        _init_scale_preserving(model)
    model.fc = nn.Linear(model.fc.in_features, NUM_CLASSES)
    return model


def _init_scale_preserving(model: nn.Module) -> None:
    """Kaiming-initialize a from-scratch backbone.

    The stock torchvision init draws conv weights from a 0.01-std truncated
    normal, which collapses activations to ~0 through 22 frozen layers when
    batch-norm running statistics are never trained. Kaiming fan-out keeps
    activation scale roughly constant in depth, so an untrained frozen
    backbone still yields usable features.
    """
    for module in model.modules():
        if isinstance(module, nn.Conv2d):
            nn.init.kaiming_normal_(module.weight, mode="fan_out",
                                    nonlinearity="relu")
            if module.bias is not None:
                nn.init.zeros_(module.bias)
        elif isinstance(module, nn.BatchNorm2d):
            nn.init.ones_(module.weight)
            nn.init.zeros_(module.bias)
        elif isinstance(module, nn.Linear):
            nn.init.normal_(module.weight, 0, 0.01)
            nn.init.zeros_(module.bias)


def _freeze_backbone(model: nn.Module) -> None:
    for name, param in model.named_parameters():
        if not name.startswith("fc."):
            param.requires_grad_(False)


def _backbone_features(model: nn.Module, images: torch.Tensor,
                       batch_size: int) -> torch.Tensor:
    """Embeddings right before the head: run the model with the head swapped
    for an identity. The backbone stays in eval mode, so this is deterministic."""
    model.eval()
    head = model.fc
    model.fc = nn.Identity()
    try:
        chunks = []
        with torch.no_grad():
            for start in range(0, len(images), batch_size):
                chunks.append(model(images[start:start + batch_size]))
        return torch.cat(chunks) if chunks else images.new_zeros((0, head.in_features))
    finally:
        model.fc = head


def _epoch_metrics(head: nn.Module, criterion, feats, labels) -> tuple[float, float]:
    with torch.no_grad():
        logits = head(feats)
        loss = float(criterion(logits, labels))
        accuracy = float((logits.argmax(dim=1) == labels).float().mean())
    return loss, accuracy


def fine_tune(dataset_dir, config: TrainConfig | None = None,
              dataset: FrameDataset | None = None) -> tuple[TrainResult, nn.Module]:
    """Train the classification head; returns the curves and the model.

    Args:
        dataset_dir: class-folder dataset root (ignored when `dataset` is given).
        config: training configuration; defaults to the selected recipe.
        dataset: optional pre-loaded dataset, mainly for grid search.
    """
    config = config or TrainConfig()
    started = time.monotonic()
    if dataset is None:
        dataset = load_dataset(dataset_dir, size=config.input_size,
                               mean=config.mean, std=config.std)
    if config.test_size >= len(dataset):
        raise ValidationError(
            f"test_size {config.test_size} needs more than {len(dataset)} images"
        )
    train_set, test_set = stratified_split(dataset, config.test_size, seed=config.seed)

    torch.manual_seed(config.seed)
    model = build_model(config)
    result = TrainResult()

    if config.freeze_backbone:
        _freeze_backbone(model)
        train_feats = _backbone_features(model, train_set.images, config.batch_size)
        val_feats = (_backbone_features(model, test_set.images, config.batch_size)
                     if len(test_set) else None)
        head = model.fc
        criterion = nn.CrossEntropyLoss()
        optimizer = torch.optim.Adam(head.parameters(), lr=config.learning_rate)
        generator = torch.Generator().manual_seed(config.seed)
        for _ in range(config.epochs):
            order = torch.randperm(len(train_feats), generator=generator)
            for start in range(0, len(order), config.batch_size):
                batch = order[start:start + config.batch_size]
                optimizer.zero_grad()
                loss = criterion(head(train_feats[batch]), train_set.labels[batch])
                loss.backward()
                optimizer.step()
            loss, accuracy = _epoch_metrics(head, criterion,
                                            train_feats, train_set.labels)
            result.train_loss.append(loss)
            result.train_accuracy.append(accuracy)
            if val_feats is not None:
                vloss, vacc = _epoch_metrics(head, criterion,
                                             val_feats, test_set.labels)
                result.val_loss.append(vloss)
                result.val_accuracy.append(vacc)
        if val_feats is not None:
            result.test_accuracy = result.val_accuracy[-1]
    else:
        result = _full_fine_tune(model, train_set, test_set, config)

    result.wall_seconds = time.monotonic() - started
    log.info("trained %d epochs in %.1fs (train acc %.4f)",
             config.epochs, result.wall_seconds, result.final_train_accuracy)
    return result, model


def _full_fine_tune(model, train_set, test_set, config) -> TrainResult:
    result = TrainResult()
    criterion = nn.CrossEntropyLoss()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    generator = torch.Generator().manual_seed(config.seed)
    for _ in range(config.epochs):
        model.train()
        order = torch.randperm(len(train_set), generator=generator)
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            optimizer.zero_grad()
            loss = criterion(model(train_set.images[batch]), train_set.labels[batch])
            loss.backward()
            optimizer.step()
        model.eval()
        with torch.no_grad():
            logits = model(train_set.images)
            result.train_loss.append(float(criterion(logits, train_set.labels)))
            result.train_accuracy.append(
                float((logits.argmax(1) == train_set.labels).float().mean())
            )
            if len(test_set):
                vlogits = model(test_set.images)
                result.val_loss.append(float(criterion(vlogits, test_set.labels)))
                result.val_accuracy.append(
                    float((vlogits.argmax(1) == test_set.labels).float().mean())
                )
    if result.val_accuracy:
        result.test_accuracy = result.val_accuracy[-1]
    return result


def backbone_state(model: nn.Module) -> dict[str, torch.Tensor]:
    """Clone of every non-head parameter and buffer, for freeze checks."""
    state = {}
    for name, tensor in list(model.named_parameters()) + list(model.named_buffers()):
        if not name.startswith("fc."):
            state[name] = tensor.detach().clone()
    return state


def write_curves_csv(result: TrainResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "train_accuracy",
                         "val_loss", "val_accuracy"])
        for epoch in range(len(result.train_loss)):
            val_loss = result.val_loss[epoch] if epoch < len(result.val_loss) else ""
            val_acc = (result.val_accuracy[epoch]
                       if epoch < len(result.val_accuracy) else "")
            writer.writerow([epoch + 1, result.train_loss[epoch],
                             result.train_accuracy[epoch], val_loss, val_acc])
