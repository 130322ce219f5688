"""Runner configuration: line-oriented `key = value` files with dotted keys.

Unknown keys are errors. Defaults: window (5, 3), 1 s cadence, confusion
classifier with an identity matrix. Exactly one classifier kind may be
configured; supplying keys for two kinds is an ambiguity error.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import urlparse

import numpy as np

from .classify import ConfusionModel
from .engine import WindowPolicy
from .errors import ConfigError

CLASSIFIER_KINDS = ("replay", "confusion", "model")

#: key -> (parser name, description); the single source of truth for valid keys.
_KNOWN_KEYS = {
    "window.n": "int",
    "window.t": "int",
    "cadence_seconds": "float",
    "seed": "int",
    "classifier.kind": "str",
    "classifier.manifest": "str",
    "classifier.model_path": "str",
    "classifier.metadata_path": "str",
    "classifier.confusion": "matrix",
    "classifier.confusion_diagonal": "float",
    "frames.dir": "str",
    "sinks.bell": "bool",
    "sinks.webhook": "str",
    "output.log": "str",
    "run.max_ticks": "int",
    "sim.passing": "int",
    "sim.crossing": "int",
    "sim.passing_dwell": "range",
    "sim.crossing_dwell": "range",
    "sim.pedestrian_fraction": "float",
    "sim.gap_extra": "range",
    "sim.n_values": "intlist",
}


@dataclass
class RunnerConfig:
    """Validated runner settings with defaults applied."""

    policy: WindowPolicy = field(default_factory=lambda: WindowPolicy(5, 3))
    cadence_seconds: float = 1.0
    seed: int = 0
    classifier_kind: str = "confusion"
    manifest: str | None = None
    model_path: str | None = None
    metadata_path: str | None = None
    confusion: ConfusionModel | None = None
    frames_dir: str | None = None
    bell: bool = False
    webhook: str | None = None
    log_path: str | None = None
    max_ticks: int | None = None
    sim_passing: int = 50
    sim_crossing: int = 50
    sim_passing_dwell: tuple[int, int] = (1, 1)
    sim_crossing_dwell: tuple[int, int] = (3, 30)
    sim_pedestrian_fraction: float = 0.76
    sim_gap_extra: tuple[int, int] = (5, 15)
    sim_n_values: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7)


def _parse_value(kind: str, value: str, key: str, lineno: int):
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            lowered = value.lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if kind == "matrix":
            rows = [
                [float(cell) for cell in row.split(",")]
                for row in value.split(";")
            ]
            return ConfusionModel(np.asarray(rows))
        if kind == "range":
            lo, _, hi = value.partition(":")
            return (int(lo), int(hi if hi else lo))
        if kind == "intlist":
            return tuple(int(v) for v in value.split(","))
        return value
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc


def parse_config_text(text: str, source: str = "<config>") -> RunnerConfig:
    entries: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}: line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"{source}: line {lineno}: duplicate key {key!r}")
        entries[key] = _parse_value(_KNOWN_KEYS[key], value, key, lineno)
        lines[key] = lineno
    return _build_config(entries, source)


def load_config(path) -> RunnerConfig:
    """Parse and validate a config file; raises ConfigError with diagnostics."""
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def _build_config(entries: dict, source: str) -> RunnerConfig:
    cfg = RunnerConfig()

    n = entries.get("window.n", cfg.policy.n)
    t = entries.get("window.t", cfg.policy.t)
    try:
        cfg.policy = WindowPolicy(int(n), int(t))
    except Exception as exc:
        raise ConfigError(f"{source}: invalid window policy: {exc}") from exc

    cfg.cadence_seconds = float(entries.get("cadence_seconds", cfg.cadence_seconds))
    if cfg.cadence_seconds <= 0:
        raise ConfigError(
            f"{source}: cadence_seconds must be > 0, got {cfg.cadence_seconds}"
        )
    cfg.seed = int(entries.get("seed", cfg.seed))

    kind = entries.get("classifier.kind")
    if kind is not None and kind not in CLASSIFIER_KINDS:
        raise ConfigError(
            f"{source}: classifier.kind must be one of {CLASSIFIER_KINDS}, got {kind!r}"
        )

    has_model = "classifier.model_path" in entries or "classifier.metadata_path" in entries
    has_confusion = ("classifier.confusion" in entries
                     or "classifier.confusion_diagonal" in entries)
    has_manifest = "classifier.manifest" in entries

    if has_model and has_confusion:
        raise ConfigError(
            f"{source}: both model and confusion classifiers configured; pick one"
        )
    if has_model and has_manifest:
        raise ConfigError(
            f"{source}: both model and replay-manifest classifiers configured; pick one"
        )
    if "classifier.confusion" in entries and "classifier.confusion_diagonal" in entries:
        raise ConfigError(
            f"{source}: set classifier.confusion or classifier.confusion_diagonal, not both"
        )

    if kind is None:
        # Infer from supplied keys; a manifest alone means replay.
        if has_model:
            kind = "model"
        elif has_confusion:
            kind = "confusion"
        elif has_manifest:
            kind = "replay"
        else:
            kind = "confusion"
    if kind == "model" and not has_model:
        raise ConfigError(f"{source}: classifier.kind=model needs classifier.model_path")
    if kind == "replay" and (has_model or has_confusion):
        raise ConfigError(
            f"{source}: classifier.kind=replay conflicts with model/confusion keys"
        )
    if kind == "confusion" and has_model:
        raise ConfigError(
            f"{source}: classifier.kind=confusion conflicts with model keys"
        )
    if kind == "model" and has_confusion:
        raise ConfigError(
            f"{source}: classifier.kind=model conflicts with confusion keys"
        )
    cfg.classifier_kind = kind

    cfg.manifest = entries.get("classifier.manifest")
    cfg.model_path = entries.get("classifier.model_path")
    cfg.metadata_path = entries.get("classifier.metadata_path")
    if "classifier.confusion" in entries:
        cfg.confusion = entries["classifier.confusion"]
    elif "classifier.confusion_diagonal" in entries:
        diag = entries["classifier.confusion_diagonal"]
        try:
            cfg.confusion = ConfusionModel.with_diagonal(diag)
        except Exception as exc:
            raise ConfigError(
                f"{source}: bad classifier.confusion_diagonal: {exc}"
            ) from exc
    elif kind == "confusion":
        cfg.confusion = ConfusionModel.identity()

    cfg.frames_dir = entries.get("frames.dir")
    cfg.bell = entries.get("sinks.bell", cfg.bell)
    webhook = entries.get("sinks.webhook")
    if webhook is not None:
        parsed = urlparse(webhook)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            raise ConfigError(f"{source}: sinks.webhook is not a valid URL: {webhook!r}")
        cfg.webhook = webhook
    cfg.log_path = entries.get("output.log")

    if "run.max_ticks" in entries:
        cfg.max_ticks = int(entries["run.max_ticks"])
        if cfg.max_ticks < 0:
            raise ConfigError(f"{source}: run.max_ticks must be >= 0")

    cfg.sim_passing = int(entries.get("sim.passing", cfg.sim_passing))
    cfg.sim_crossing = int(entries.get("sim.crossing", cfg.sim_crossing))
    if cfg.sim_passing < 0 or cfg.sim_crossing < 0:
        raise ConfigError(f"{source}: sim episode counts must be >= 0")
    cfg.sim_passing_dwell = entries.get("sim.passing_dwell", cfg.sim_passing_dwell)
    cfg.sim_crossing_dwell = entries.get("sim.crossing_dwell", cfg.sim_crossing_dwell)
    cfg.sim_pedestrian_fraction = float(
        entries.get("sim.pedestrian_fraction", cfg.sim_pedestrian_fraction)
    )
    cfg.sim_gap_extra = entries.get("sim.gap_extra", cfg.sim_gap_extra)
    cfg.sim_n_values = entries.get("sim.n_values", cfg.sim_n_values)
    if not cfg.sim_n_values or any(v < 1 for v in cfg.sim_n_values):
        raise ConfigError(f"{source}: sim.n_values must be positive integers")
    return cfg
