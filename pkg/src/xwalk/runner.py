"""Live capture loop: classify one frame per cadence tick, push the engine,
fan triggers out to sinks, and persist an append-only JSON-lines event log.

Concurrency: one producer thread acquires frames and paces the cadence;
the consumer (the calling thread) classifies, pushes, and runs sinks. The
hand-off queue holds at most one frame, so a slow consumer back-pressures
the producer: ticks are delayed, never skipped. Late ticks are counted
and logged.
"""
from __future__ import annotations

import json
import logging
import queue
import sys
import threading
import time
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .classify import (
    ConfusionBackend,
    ModelBackend,
    ReplayBackend,
    classify_frame,
    parse_manifest,
    _resolve_manifest,
)
from .config import RunnerConfig
from .engine import FrameClass, Observation, TriggerEngine, TriggerEvent
from .errors import (
    ClassificationError,
    DecodeError,
    EndOfStream,
    ValidationError,
)

log = logging.getLogger("xwalk.runner")

_SENTINEL = object()
IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp", ".gif", ".tif", ".tiff")


@dataclass(frozen=True)
class EventRecord:
    """One loop tick: what was seen and whether the policy fired."""

    timestamp: float
    predicted_class: FrameClass
    scores: tuple[float, float, float] | None
    positive_count: int
    triggered: bool
    dominant_class: FrameClass | None
    error: bool

    def to_json_line(self) -> str:
        return json.dumps({
            "timestamp": self.timestamp,
            "predicted_class": self.predicted_class.value,
            "scores": list(self.scores) if self.scores is not None else None,
            "positive_count": self.positive_count,
            "triggered": self.triggered,
            "dominant_class": (self.dominant_class.value
                               if self.dominant_class is not None else None),
            "error": self.error,
        })

    @classmethod
    def from_json_line(cls, line: str) -> "EventRecord":
        try:
            obj = json.loads(line)
            return cls(
                timestamp=float(obj["timestamp"]),
                predicted_class=FrameClass(obj["predicted_class"]),
                scores=(tuple(obj["scores"]) if obj.get("scores") is not None
                        else None),
                positive_count=int(obj["positive_count"]),
                triggered=bool(obj["triggered"]),
                dominant_class=(FrameClass(obj["dominant_class"])
                                if obj.get("dominant_class") is not None else None),
                error=bool(obj.get("error", False)),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"malformed event record {line!r}: {exc}") from exc


def parse_event_log(path) -> list[EventRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if line:
                records.append(EventRecord.from_json_line(line))
    return records


def trigger_timestamps(records) -> list[float]:
    """Timestamps of triggered records, for offline evaluation."""
    return [r.timestamp for r in records if r.triggered]


def summarize_log(records) -> dict:
    """Small summary of an event log for the `report` subcommand."""
    records = list(records)
    counts = {cls.value: 0 for cls in FrameClass}
    for r in records:
        counts[r.predicted_class.value] += 1
    return {
        "predictions": len(records),
        "triggers": sum(1 for r in records if r.triggered),
        "errors": sum(1 for r in records if r.error),
        "class_counts": counts,
        "first_timestamp": records[0].timestamp if records else None,
        "last_timestamp": records[-1].timestamp if records else None,
    }


@dataclass(frozen=True)
class RunResult:
    records: tuple[EventRecord, ...]
    events: tuple[TriggerEvent, ...]
    late_ticks: int
    log_path: str | None


def build_backend(config: RunnerConfig, seed: int | None = None):
    """Instantiate the configured classifier backend."""
    if config.classifier_kind == "replay":
        if config.manifest is None:
            raise ValidationError("replay classifier needs classifier.manifest")
        return ReplayBackend(config.manifest)
    if config.classifier_kind == "model":
        return ModelBackend(config.model_path, config.metadata_path)
    confusion = config.confusion
    if confusion is None:
        raise ValidationError("confusion classifier needs a confusion matrix")
    return ConfusionBackend(confusion, seed if seed is not None else config.seed)


def _frame_iter(config: RunnerConfig, backend, frame_hook):
    """Yield one frame per tick; the meaning of 'frame' depends on the backend."""
    if frame_hook is not None:
        def hook_frames():
            while True:
                frame = frame_hook()
                if frame is None:
                    return
                yield frame
        return hook_frames()
    if config.classifier_kind == "replay":
        return iter([None] * len(backend))
    if config.classifier_kind == "confusion":
        if config.manifest is None:
            raise ValidationError(
                "confusion classifier needs classifier.manifest (true classes) "
                "or a frame hook for live runs"
            )
        manifest = _resolve_manifest(config.manifest)
        records = parse_manifest(manifest) if manifest is not None else []
        return iter([cls for _, cls, _ in records])
    # model backend: a directory of image files, lexicographic order
    if config.frames_dir is None:
        raise ValidationError("model classifier needs frames.dir or a frame hook")
    frames_dir = Path(config.frames_dir)
    if not frames_dir.is_dir():
        raise FileNotFoundError(f"frame source not found: {frames_dir}")
    paths = sorted(
        p for p in frames_dir.iterdir()
        if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file()
    )
    return iter(paths)


class _Producer(threading.Thread):
    """Paces frame acquisition at the cadence; blocks when the queue is full."""

    def __init__(self, frames, cadence: float, handoff: queue.Queue,
                 stop: threading.Event):
        super().__init__(daemon=True, name="xwalk-frame-producer")
        self._frames = frames
        self._cadence = cadence
        self._queue = handoff
        self._stop_event = stop
        self.late_ticks = 0

    def run(self) -> None:
        try:
            deadline = time.monotonic()
            for frame in self._frames:
                if self._stop_event.is_set():
                    return
                now = time.monotonic()
                if now < deadline:
                    time.sleep(deadline - now)
                elif now - deadline > 0.1 * self._cadence:
                    # Consumer overran the cadence; deliver late rather than skip.
                    self.late_ticks += 1
                    deadline = now
                if not self._put(frame):
                    return
                deadline += self._cadence
        except Exception as exc:
            log.error("frame acquisition failed: %s", exc)
        finally:
            self._put(_SENTINEL)

    def _put(self, item) -> bool:
        while not self._stop_event.is_set():
            try:
                self._queue.put(item, timeout=0.1)
                return True
            except queue.Full:
                continue
        return False


def run_live(config: RunnerConfig, frame_hook=None, bell_stream=None,
             seed: int | None = None) -> RunResult:
    """Run the capture/classify/decide loop until the source ends.

    Transient classification failures are recorded as STREET with the
    error flag set; the loop keeps going. A webhook failure is logged and
    ignored. KeyboardInterrupt shuts down cleanly and flushes the log.
    """
    backend = build_backend(config, seed=seed)
    frames = _frame_iter(config, backend, frame_hook)
    engine = TriggerEngine(config.policy)

    handoff: queue.Queue = queue.Queue(maxsize=1)
    stop = threading.Event()
    producer = _Producer(frames, config.cadence_seconds, handoff, stop)

    records: list[EventRecord] = []
    events: list[TriggerEvent] = []
    log_fh = open(config.log_path, "a", encoding="utf-8") if config.log_path else None
    if bell_stream is None and config.bell:
        bell_stream = sys.stdout

    ticks = 0
    last_ts = float("-inf")
    producer.start()
    try:
        while True:
            if config.max_ticks is not None and ticks >= config.max_ticks:
                break
            item = handoff.get()
            if item is _SENTINEL:
                break
            ticks += 1
            timestamp = max(time.time(), last_ts)
            last_ts = timestamp
            error = False
            scores = None
            try:
                obs = classify_frame(backend, item, timestamp)
                predicted = obs.frame_class
                scores = obs.scores
            except EndOfStream:
                break
            except (ClassificationError, DecodeError, ValidationError) as exc:
                log.warning("classification failed at tick %d: %s", ticks, exc)
                predicted = FrameClass.STREET
                obs = Observation(timestamp=timestamp, frame_class=predicted)
                error = True
            event = engine.push(obs)
            record = EventRecord(
                timestamp=timestamp,
                predicted_class=predicted,
                scores=scores,
                positive_count=engine.positive_count,
                triggered=event is not None,
                dominant_class=event.dominant_class if event else None,
                error=error,
            )
            records.append(record)
            if log_fh is not None:
                log_fh.write(record.to_json_line() + "\n")
                log_fh.flush()
            if event is not None:
                events.append(event)
                _fire_sinks(event, config, bell_stream)
    except KeyboardInterrupt:
        log.info("interrupted; flushing event log")
    finally:
        stop.set()
        producer.join(timeout=2.0)
        if log_fh is not None:
            log_fh.close()
    if producer.late_ticks:
        log.warning("%d tick(s) exceeded the %.3fs cadence and were delayed",
                    producer.late_ticks, config.cadence_seconds)
    return RunResult(records=tuple(records), events=tuple(events),
                     late_ticks=producer.late_ticks,
                     log_path=config.log_path)


def _fire_sinks(event: TriggerEvent, config: RunnerConfig, bell_stream) -> None:
    if bell_stream is not None:
        bell_stream.write("\a")
        bell_stream.flush()
    if config.webhook:
        post_webhook(config.webhook, event, config)


def post_webhook(url: str, event: TriggerEvent, config: RunnerConfig,
                 timeout: float = 2.0) -> bool:
    """POST a trigger notification; returns False (and logs) on failure."""
    body = json.dumps({
        "timestamp": event.timestamp,
        "dominant_class": event.dominant_class.value,
        "positive_count": event.positive_count,
        "policy": {"n": config.policy.n, "t": config.policy.t},
    }).encode("utf-8")
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout):
            return True
    except Exception as exc:
        log.warning("webhook delivery to %s failed: %s", url, exc)
        return False
