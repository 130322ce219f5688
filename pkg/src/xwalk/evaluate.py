"""Episode scoring and deployment-style reporting.

A Passing episode is correct when no trigger fires inside its interval;
a Crossing episode is correct when at least one does. Triggers outside
every episode interval are false alarms. Boundary timestamps (exactly at
an episode's start or end second) count as inside.

All ratios are kept at full precision; rounding happens only in the
display helpers (half-up, 4 decimals for accuracies, 5 for rates).
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum

from .engine import FrameClass
from .errors import ValidationError

SECONDS_PER_DAY = 86400


class EpisodeKind(Enum):
    PASSING = "passing"
    CROSSING = "crossing"


@dataclass(frozen=True)
class Episode:
    """Ground-truth interval of one person passing or waiting to cross."""

    kind: EpisodeKind
    traveler: FrameClass
    start: float
    end: float

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValidationError(
                f"episode start {self.start} must not exceed end {self.end}"
            )
        if not self.traveler.positive:
            raise ValidationError("episode traveler must be pedestrian or biker")

    def contains(self, timestamp: float) -> bool:
        return self.start <= timestamp <= self.end


@dataclass(frozen=True)
class EpisodeOutcome:
    episode: Episode
    correct: bool
    triggers_in_interval: int


def _timestamps(trigger_log) -> list[float]:
    out = []
    for entry in trigger_log:
        ts = getattr(entry, "timestamp", entry)
        out.append(float(ts))
    return out


def score_episodes(trigger_log, episodes) -> tuple[list[EpisodeOutcome], int]:
    """Score a trigger log against ground-truth episodes.

    Args:
        trigger_log: iterable of TriggerEvents or bare timestamps.
        episodes: non-overlapping Episodes.

    Returns:
        (per-episode outcomes, count of false-alarm trigger events).
    """
    eps = sorted(episodes, key=lambda e: (e.start, e.end))
    for prev, nxt in zip(eps, eps[1:]):
        if nxt.start <= prev.end:
            raise ValidationError(
                f"episodes overlap: [{prev.start}, {prev.end}] and [{nxt.start}, {nxt.end}]"
            )

    hits = {id(e): 0 for e in eps}
    false_alarms = 0
    for ts in _timestamps(trigger_log):
        for ep in eps:
            if ep.contains(ts):
                hits[id(ep)] += 1
                break
        else:
            false_alarms += 1

    outcomes = []
    for ep in eps:
        count = hits[id(ep)]
        correct = count == 0 if ep.kind is EpisodeKind.PASSING else count >= 1
        outcomes.append(EpisodeOutcome(episode=ep, correct=correct,
                                       triggers_in_interval=count))
    return outcomes, false_alarms


@dataclass(frozen=True)
class CellCount:
    correct: int
    total: int

    def __post_init__(self) -> None:
        if not 0 <= self.correct <= self.total:
            raise ValidationError(
                f"correct count {self.correct} must lie in [0, total={self.total}]"
            )

    def __add__(self, other: "CellCount") -> "CellCount":
        return CellCount(self.correct + other.correct, self.total + other.total)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 1.0


@dataclass(frozen=True)
class TravelerCounts:
    """Per-traveler breakdown row (pedestrians or bike riders)."""

    traveler: FrameClass
    passing: CellCount
    crossing: CellCount


@dataclass(frozen=True)
class LocationReport:
    """Episode-level results for one deployment location."""

    passing: CellCount
    crossing: CellCount
    false_alarm_events: int
    predictions_made: int
    label: str = ""
    by_traveler: tuple[TravelerCounts, ...] = ()

    def __post_init__(self) -> None:
        if self.predictions_made <= 0:
            raise ValidationError("predictions_made must be > 0")
        if self.false_alarm_events < 0:
            raise ValidationError("false_alarm_events must be >= 0")

    @classmethod
    def from_counts(cls, passing_correct, passing_total, crossing_correct,
                    crossing_total, false_alarm_events=0, predictions_made=3600,
                    label=""):
        return cls(
            passing=CellCount(passing_correct, passing_total),
            crossing=CellCount(crossing_correct, crossing_total),
            false_alarm_events=false_alarm_events,
            predictions_made=predictions_made,
            label=label,
        )

    @classmethod
    def from_outcomes(cls, outcomes, false_alarm_events, predictions_made, label=""):
        """Build a report from score_episodes() output."""
        cells = {}
        for out in outcomes:
            key = (out.episode.traveler, out.episode.kind)
            correct, total = cells.get(key, (0, 0))
            cells[key] = (correct + int(out.correct), total + 1)

        def cell(traveler, kind):
            correct, total = cells.get((traveler, kind), (0, 0))
            return CellCount(correct, total)

        by_traveler = tuple(
            TravelerCounts(
                traveler=tr,
                passing=cell(tr, EpisodeKind.PASSING),
                crossing=cell(tr, EpisodeKind.CROSSING),
            )
            for tr in (FrameClass.PEDESTRIAN, FrameClass.BIKER)
        )
        passing = by_traveler[0].passing + by_traveler[1].passing
        crossing = by_traveler[0].crossing + by_traveler[1].crossing
        return cls(passing=passing, crossing=crossing,
                   false_alarm_events=false_alarm_events,
                   predictions_made=predictions_made,
                   label=label, by_traveler=by_traveler)

    @property
    def passing_accuracy(self) -> float:
        return self.passing.accuracy

    @property
    def crossing_accuracy(self) -> float:
        return self.crossing.accuracy

    @property
    def combined_accuracy(self) -> float:
        pooled = self.passing + self.crossing
        return pooled.accuracy

    @property
    def false_alarm_rate(self) -> float:
        return self.false_alarm_events / self.predictions_made


@dataclass(frozen=True)
class AggregateReport:
    """Pooled metrics across locations. All fields are full precision."""

    overall_accuracy: float
    crossing_accuracy: float
    passing_accuracy: float
    mean_false_alarm_rate: float
    helped_per_hour: float
    false_activations_per_hour: float
    projected_false_alarms_per_day: int


def aggregate(reports, hours_per_report: float = 1.0) -> AggregateReport:
    """Pool location reports into deployment-wide metrics.

    Accuracies are pooled ratios (sum of corrects over sum of totals),
    not means of per-location accuracies. The false-alarm projection is
    computed from the full-precision mean rate, never from its rounded
    display form.
    """
    reports = list(reports)
    if not reports:
        raise ValidationError("aggregate() needs at least one location report")
    if hours_per_report <= 0:
        raise ValidationError("hours_per_report must be > 0")

    passing = CellCount(0, 0)
    crossing = CellCount(0, 0)
    for r in reports:
        passing = passing + r.passing
        crossing = crossing + r.crossing
    pooled = passing + crossing
    hours = hours_per_report * len(reports)
    mean_rate = sum(r.false_alarm_rate for r in reports) / len(reports)

    return AggregateReport(
        overall_accuracy=pooled.accuracy,
        crossing_accuracy=crossing.accuracy,
        passing_accuracy=passing.accuracy,
        mean_false_alarm_rate=mean_rate,
        helped_per_hour=crossing.correct / hours,
        false_activations_per_hour=(passing.total - passing.correct) / hours,
        projected_false_alarms_per_day=int(
            round_half_up(mean_rate * SECONDS_PER_DAY, 0)
        ),
    )


def round_half_up(value: float, places: int) -> float:
    """Round with ties away from zero, e.g. 0.84955 -> 0.8496 at 4 places."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def display_accuracy(value: float) -> str:
    return f"{round_half_up(value, 4):.4f}"


def display_rate(value: float) -> str:
    return f"{round_half_up(value, 5):.5f}"


_TRAVELER_LABELS = {FrameClass.PEDESTRIAN: "Pedestrians", FrameClass.BIKER: "Bike riders"}


def format_location_table(report: LocationReport) -> str:
    """Aligned plain-text table for one location."""
    rows = [("Method of transportation",
             "Passing correct", "Passing total",
             "Crossing correct", "Crossing total")]
    for tc in report.by_traveler:
        rows.append((_TRAVELER_LABELS[tc.traveler],
                     str(tc.passing.correct), str(tc.passing.total),
                     str(tc.crossing.correct), str(tc.crossing.total)))
    rows.append(("Total",
                 str(report.passing.correct), str(report.passing.total),
                 str(report.crossing.correct), str(report.crossing.total)))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = []
    if report.label:
        lines.append(report.label)
    for r in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    lines.append(f"Accuracy (passing)   {display_accuracy(report.passing_accuracy)}")
    lines.append(f"Accuracy (crossing)  {display_accuracy(report.crossing_accuracy)}")
    lines.append(f"Combined accuracy    {display_accuracy(report.combined_accuracy)}")
    lines.append(f"False alarms         {report.false_alarm_events}"
                 f" in {report.predictions_made} predictions"
                 f" (rate {display_rate(report.false_alarm_rate)})")
    return "\n".join(lines)


def location_report_to_dict(report: LocationReport) -> dict:
    """Machine-readable form of a LocationReport (documented schema)."""
    return {
        "label": report.label,
        "passing": {"correct": report.passing.correct, "total": report.passing.total},
        "crossing": {"correct": report.crossing.correct, "total": report.crossing.total},
        "by_traveler": [
            {
                "traveler": tc.traveler.value,
                "passing": {"correct": tc.passing.correct, "total": tc.passing.total},
                "crossing": {"correct": tc.crossing.correct, "total": tc.crossing.total},
            }
            for tc in report.by_traveler
        ],
        "passing_accuracy": report.passing_accuracy,
        "crossing_accuracy": report.crossing_accuracy,
        "combined_accuracy": report.combined_accuracy,
        "false_alarm_events": report.false_alarm_events,
        "predictions_made": report.predictions_made,
        "false_alarm_rate": report.false_alarm_rate,
    }


def aggregate_to_dict(agg: AggregateReport) -> dict:
    return {
        "overall_accuracy": agg.overall_accuracy,
        "crossing_accuracy": agg.crossing_accuracy,
        "passing_accuracy": agg.passing_accuracy,
        "mean_false_alarm_rate": agg.mean_false_alarm_rate,
        "helped_per_hour": agg.helped_per_hour,
        "false_activations_per_hour": agg.false_activations_per_hour,
        "projected_false_alarms_per_day": agg.projected_false_alarms_per_day,
    }
