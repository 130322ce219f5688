"""Sliding-window trigger engine.

Keeps the n most recent frame classifications and fires an edge-triggered
activation event when the count of positive frames (pedestrian or biker)
reaches the threshold t. After firing, the engine stays quiet until the
count drops back below t (re-arm), so one threshold crossing yields exactly
one event. A threshold of 0 means unconditional firing on every push.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum

from .errors import OrderingError, PolicyError, ValidationError


class FrameClass(Enum):
    """Content label of a single camera frame. STREET is the only negative class."""

    STREET = "street"
    PEDESTRIAN = "pedestrian"
    BIKER = "biker"

    @property
    def positive(self) -> bool:
        return self is not FrameClass.STREET

    @classmethod
    def parse(cls, name: str) -> "FrameClass":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValidationError(
                f"unknown frame class {name!r} (expected street, pedestrian, or biker)"
            ) from None


#: Canonical class order used everywhere scores appear as a 3-vector.
CLASS_ORDER = (FrameClass.STREET, FrameClass.PEDESTRIAN, FrameClass.BIKER)

_SCORE_SUM_TOL = 1e-6


def _validate_scores(scores) -> tuple[float, float, float]:
    vals = tuple(float(v) for v in scores)
    if len(vals) != 3:
        raise ValidationError(f"scores must have 3 entries, got {len(vals)}")
    if any(v != v for v in vals):  # NaN check
        raise ValidationError(f"scores contain NaN: {vals}")
    if any(v < 0.0 or v > 1.0 for v in vals):
        raise ValidationError(f"scores must lie in [0, 1]: {vals}")
    if abs(sum(vals) - 1.0) > _SCORE_SUM_TOL:
        raise ValidationError(f"scores must sum to 1 (got {sum(vals)!r})")
    return vals


@dataclass(frozen=True)
class Observation:
    """One timestamped frame classification, optionally with class scores.

    Scores, when present, follow CLASS_ORDER, must form a probability
    vector, and must be maximal at frame_class.
    """

    timestamp: float
    frame_class: FrameClass
    scores: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.scores is not None:
            vals = _validate_scores(self.scores)
            object.__setattr__(self, "scores", vals)
            if vals[CLASS_ORDER.index(self.frame_class)] != max(vals):
                raise ValidationError(
                    f"frame_class {self.frame_class.value} is not an argmax of scores {vals}"
                )


@dataclass(frozen=True)
class WindowPolicy:
    """Fire when at least t of the n most recent frames are positive."""

    n: int
    t: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PolicyError(f"window size must be >= 1, got n={self.n}")
        if not 0 <= self.t <= self.n:
            raise PolicyError(
                f"threshold must satisfy 0 <= t <= n, got t={self.t} with n={self.n}"
            )


@dataclass(frozen=True)
class TriggerEvent:
    """An activation decision: the window crossed the policy threshold."""

    timestamp: float
    positive_count: int
    dominant_class: FrameClass
    window_snapshot: tuple[FrameClass, ...]


class TriggerEngine:
    """Mutable decision state for one policy.

    Single-owner: safe to hand between threads but not to mutate
    concurrently. Window slots start as STREET, so the engine is
    conservative during warm-up.
    """

    def __init__(self, policy: WindowPolicy):
        self.policy = policy
        self._window: deque[FrameClass] = deque(
            [FrameClass.STREET] * policy.n, maxlen=policy.n
        )
        self._count = 0
        self._armed = True
        self._last_timestamp: float | None = None

    @property
    def positive_count(self) -> int:
        """Number of positive frames currently in the window."""
        return self._count

    @property
    def armed(self) -> bool:
        return self._armed

    def window(self) -> tuple[FrameClass, ...]:
        """Window contents, oldest first."""
        return tuple(self._window)

    def reset(self) -> None:
        """Return to the initial state; the policy is kept."""
        self._window = deque([FrameClass.STREET] * self.policy.n, maxlen=self.policy.n)
        self._count = 0
        self._armed = True
        self._last_timestamp = None

    def push(self, obs: Observation) -> TriggerEvent | None:
        """Advance the window by one observation.

        Returns a TriggerEvent when the policy fires on this push, else None.
        Raises OrderingError if obs.timestamp precedes the last push.
        """
        if self._last_timestamp is not None and obs.timestamp < self._last_timestamp:
            raise OrderingError(
                f"observation at {obs.timestamp} precedes previous push at {self._last_timestamp}"
            )
        self._last_timestamp = obs.timestamp

        evicted = self._window[0]
        self._window.append(obs.frame_class)
        self._count += int(obs.frame_class.positive) - int(evicted.positive)

        t = self.policy.t
        if t == 0:
            return self._event(obs.timestamp)
        if self._count >= t:
            if self._armed:
                self._armed = False
                return self._event(obs.timestamp)
            return None
        self._armed = True
        return None

    def _event(self, timestamp: float) -> TriggerEvent:
        snapshot = tuple(self._window)
        pedestrians = sum(1 for c in snapshot if c is FrameClass.PEDESTRIAN)
        bikers = sum(1 for c in snapshot if c is FrameClass.BIKER)
        # Ties (including the all-street t=0 case) go to PEDESTRIAN.
        dominant = FrameClass.PEDESTRIAN if pedestrians >= bikers else FrameClass.BIKER
        return TriggerEvent(
            timestamp=timestamp,
            positive_count=self._count,
            dominant_class=dominant,
            window_snapshot=snapshot,
        )
