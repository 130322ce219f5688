"""Scenario generation, stream rendering, corruption, and policy sweeps.

A scenario is a timeline of non-overlapping person episodes separated by
street-only gaps long enough to drain every window under test, so each
episode is scored independently. Per-frame predictions are sampled once
per (scenario, confusion, seed) and reused across every policy in a
sweep, so policy comparisons are paired.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .classify import ConfusionModel
from .engine import FrameClass, Observation, TriggerEngine, TriggerEvent, WindowPolicy
from .errors import ValidationError
from .evaluate import Episode, EpisodeKind, EpisodeOutcome, score_episodes

SWEEP_CSV_HEADER = ("n", "t", "passing_correct", "crossing_correct",
                    "accuracy", "false_alarms")


@dataclass(frozen=True)
class EpisodeSpec:
    """One scheduled person: kind, traveler, start second, visible seconds."""

    kind: EpisodeKind
    traveler: FrameClass
    start: int
    visible_duration: int

    def __post_init__(self) -> None:
        if self.visible_duration < 1:
            raise ValidationError(
                f"visible_duration must be >= 1, got {self.visible_duration}"
            )
        if self.start < 0:
            raise ValidationError(f"start must be >= 0, got {self.start}")
        if not self.traveler.positive:
            raise ValidationError("traveler must be pedestrian or biker")

    @property
    def end(self) -> int:
        """Last visible second (inclusive)."""
        return self.start + self.visible_duration - 1

    def to_episode(self) -> Episode:
        return Episode(kind=self.kind, traveler=self.traveler,
                       start=float(self.start), end=float(self.end))


@dataclass(frozen=True)
class Scenario:
    total_seconds: int
    episodes: tuple[EpisodeSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "episodes", tuple(self.episodes))
        previous = None
        for ep in self.episodes:
            if previous is not None and ep.start <= previous.end:
                raise ValidationError(
                    f"episodes must be sorted and non-overlapping: "
                    f"[{previous.start}, {previous.end}] then [{ep.start}, {ep.end}]"
                )
            if ep.end >= self.total_seconds:
                raise ValidationError(
                    f"episode ending at {ep.end} exceeds total_seconds={self.total_seconds}"
                )
            previous = ep


def full_policy_grid(n_values=range(1, 8)) -> tuple[WindowPolicy, ...]:
    """Every (n, t) with t in 0..n for each n."""
    grid = tuple(WindowPolicy(n, t) for n in n_values for t in range(n + 1))
    if not grid:
        raise ValidationError("policy grid is empty")
    return grid


@dataclass(frozen=True)
class SimConfig:
    """Knobs for scenario generation and sweeps.

    Dwell bounds are inclusive whole seconds at the 1 frame/s cadence.
    The pedestrian fraction mirrors the roughly 3.2:1 pedestrian-to-biker
    mix seen at real crosswalks.
    """

    confusion: ConfusionModel = field(default_factory=ConfusionModel.identity)
    policies: tuple[WindowPolicy, ...] = field(default_factory=full_policy_grid)
    seed: int = 0
    passing_dwell: tuple[int, int] = (1, 1)
    crossing_dwell: tuple[int, int] = (3, 30)
    pedestrian_fraction: float = 0.76
    gap_extra: tuple[int, int] = (5, 15)

    def __post_init__(self) -> None:
        for name in ("passing_dwell", "crossing_dwell", "gap_extra"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValidationError(f"{name}: low bound {lo} exceeds high bound {hi}")
            if name != "gap_extra" and lo < 1:
                raise ValidationError(f"{name}: bounds must be >= 1, got {lo}")
            if name == "gap_extra" and lo < 0:
                raise ValidationError(f"gap_extra bounds must be >= 0, got {lo}")
        if not 0.0 <= self.pedestrian_fraction <= 1.0:
            raise ValidationError(
                f"pedestrian_fraction must lie in [0, 1], got {self.pedestrian_fraction}"
            )
        if not self.policies:
            raise ValidationError("policies must be non-empty")

    @property
    def drain_seconds(self) -> int:
        """Gap floor: the largest window under test, so windows empty out."""
        return max(p.n for p in self.policies)


def generate_scenario(config: SimConfig, n_passing: int, n_crossing: int) -> Scenario:
    """Schedule n_passing + n_crossing episodes in random order.

    Deterministic for a given config.seed. Every gap is at least
    config.drain_seconds long.
    """
    if n_passing < 0 or n_crossing < 0:
        raise ValidationError("episode counts must be >= 0")
    rng = np.random.default_rng(config.seed)
    kinds = [EpisodeKind.PASSING] * n_passing + [EpisodeKind.CROSSING] * n_crossing
    rng.shuffle(kinds)

    def gap() -> int:
        lo, hi = config.gap_extra
        return config.drain_seconds + int(rng.integers(lo, hi + 1))

    episodes = []
    cursor = gap()
    for kind in kinds:
        lo, hi = (config.passing_dwell if kind is EpisodeKind.PASSING
                  else config.crossing_dwell)
        duration = int(rng.integers(lo, hi + 1))
        traveler = (FrameClass.PEDESTRIAN
                    if rng.random() < config.pedestrian_fraction
                    else FrameClass.BIKER)
        episodes.append(EpisodeSpec(kind=kind, traveler=traveler,
                                    start=cursor, visible_duration=duration))
        cursor += duration + gap()
    return Scenario(total_seconds=cursor, episodes=tuple(episodes))


def render_true_stream(scenario: Scenario) -> list[FrameClass]:
    """Per-second true classes: the traveler inside episodes, STREET elsewhere."""
    stream = [FrameClass.STREET] * scenario.total_seconds
    for ep in scenario.episodes:
        for second in range(ep.start, ep.end + 1):
            stream[second] = ep.traveler
    return stream


def corrupt_stream(true_stream, confusion: ConfusionModel,
                   rng: np.random.Generator) -> list[FrameClass]:
    """Pass every true class through the confusion model, one draw per frame."""
    return confusion.sample_stream(true_stream, rng)


def run_stream(predictions, policy: WindowPolicy) -> list[TriggerEvent]:
    """Push a prediction stream through a fresh engine; timestamps are indices."""
    engine = TriggerEngine(policy)
    events = []
    for second, cls in enumerate(predictions):
        ev = engine.push(Observation(timestamp=float(second), frame_class=cls))
        if ev is not None:
            events.append(ev)
    return events


@dataclass(frozen=True)
class ScenarioResult:
    trigger_log: tuple[TriggerEvent, ...]
    outcomes: tuple[EpisodeOutcome, ...]
    false_alarms: int
    predictions_made: int


def run_scenario(scenario: Scenario, policy: WindowPolicy,
                 confusion: ConfusionModel, seed: int = 0) -> ScenarioResult:
    """Corrupt the scenario's true stream and score one policy against it."""
    rng = np.random.default_rng(seed)
    predictions = corrupt_stream(render_true_stream(scenario), confusion, rng)
    events = run_stream(predictions, policy)
    outcomes, false_alarms = score_episodes(
        events, [ep.to_episode() for ep in scenario.episodes]
    )
    return ScenarioResult(
        trigger_log=tuple(events),
        outcomes=tuple(outcomes),
        false_alarms=false_alarms,
        predictions_made=len(predictions),
    )


@dataclass(frozen=True)
class SweepRow:
    n: int
    t: int
    passing_correct: int
    passing_total: int
    crossing_correct: int
    crossing_total: int
    accuracy: float
    false_alarms: int


def sweep_policies(scenarios, confusion: ConfusionModel,
                   policies=None, seed: int = 0) -> list[SweepRow]:
    """Evaluate every policy against every scenario on shared predictions.

    Predictions are sampled once per scenario (from a child seed of
    `seed`), then replayed through each policy, so rows differ only in
    the policy.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValidationError("sweep needs at least one scenario")
    if policies is None:
        policies = full_policy_grid()
    policies = list(policies)
    if not policies:
        raise ValidationError("sweep needs at least one policy")

    children = np.random.SeedSequence(seed).spawn(len(scenarios))
    streams = []
    episode_lists = []
    for scenario, child in zip(scenarios, children):
        rng = np.random.Generator(np.random.PCG64(child))
        streams.append(corrupt_stream(render_true_stream(scenario), confusion, rng))
        episode_lists.append([ep.to_episode() for ep in scenario.episodes])

    rows = []
    for policy in policies:
        tallies = {EpisodeKind.PASSING: [0, 0], EpisodeKind.CROSSING: [0, 0]}
        false_alarms = 0
        for predictions, episodes in zip(streams, episode_lists):
            events = run_stream(predictions, policy)
            outcomes, fa = score_episodes(events, episodes)
            false_alarms += fa
            for out in outcomes:
                tally = tallies[out.episode.kind]
                tally[0] += int(out.correct)
                tally[1] += 1
        pc, pt = tallies[EpisodeKind.PASSING]
        cc, ct = tallies[EpisodeKind.CROSSING]
        total = pt + ct
        rows.append(SweepRow(
            n=policy.n, t=policy.t,
            passing_correct=pc, passing_total=pt,
            crossing_correct=cc, crossing_total=ct,
            accuracy=(pc + cc) / total if total else 1.0,
            false_alarms=false_alarms,
        ))
    return rows


def write_sweep_csv(rows, path) -> None:
    """CSV with header n,t,passing_correct,crossing_correct,accuracy,false_alarms."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(SWEEP_CSV_HEADER))
        for row in rows:
            writer.writerow([row.n, row.t, row.passing_correct,
                             row.crossing_correct, repr(row.accuracy),
                             row.false_alarms])


def write_scenario(scenario: Scenario, path) -> None:
    """Line-oriented scenario file: `total N` then `kind traveler start duration`."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"total {scenario.total_seconds}\n")
        for ep in scenario.episodes:
            fh.write(f"{ep.kind.value} {ep.traveler.value} "
                     f"{ep.start} {ep.visible_duration}\n")


def read_scenario(path) -> Scenario:
    """Parse a scenario file written by write_scenario()."""
    episodes = []
    total = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "total":
                if len(parts) != 2:
                    raise ValidationError(f"{path}:{lineno}: expected 'total N'")
                total = int(parts[1])
                continue
            if len(parts) != 4:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'kind traveler start duration'"
                )
            try:
                kind = EpisodeKind(parts[0].lower())
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: unknown episode kind {parts[0]!r}"
                ) from None
            episodes.append(EpisodeSpec(
                kind=kind,
                traveler=FrameClass.parse(parts[1]),
                start=int(parts[2]),
                visible_duration=int(parts[3]),
            ))
    if total is None:
        total = (max(ep.end for ep in episodes) + 1) if episodes else 0
    return Scenario(total_seconds=total, episodes=tuple(episodes))


def read_episode_file(path) -> list[Episode]:
    """Episodes for the evaluator, from the same line format as scenarios."""
    return [ep.to_episode() for ep in read_scenario(path).episodes]
