"""Grid search over window policies against a scenario suite.

Ranking: combined accuracy first, then crossing correctness (a policy
that catches more crossings wins a tie), then smaller n (shorter wait),
then smaller t.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

from .classify import ConfusionModel
from .engine import WindowPolicy
from .errors import ValidationError
from .simulate import SWEEP_CSV_HEADER, SweepRow, full_policy_grid, sweep_policies


@dataclass(frozen=True)
class PolicyResult:
    policy: WindowPolicy
    passing_correct: int
    passing_total: int
    crossing_correct: int
    crossing_total: int
    false_alarms: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.passing_correct <= self.passing_total:
            raise ValidationError("passing counts out of range")
        if not 0 <= self.crossing_correct <= self.crossing_total:
            raise ValidationError("crossing counts out of range")

    @property
    def combined_accuracy(self) -> float:
        total = self.passing_total + self.crossing_total
        if total == 0:
            return 1.0
        return (self.passing_correct + self.crossing_correct) / total

    @classmethod
    def from_sweep_row(cls, row: SweepRow) -> "PolicyResult":
        return cls(
            policy=WindowPolicy(row.n, row.t),
            passing_correct=row.passing_correct,
            passing_total=row.passing_total,
            crossing_correct=row.crossing_correct,
            crossing_total=row.crossing_total,
            false_alarms=row.false_alarms,
        )


def rank_policies(results) -> list[PolicyResult]:
    """Deterministic total order; permutation of the input does not matter."""
    return sorted(
        results,
        key=lambda r: (-r.combined_accuracy, -r.crossing_correct,
                       r.policy.n, r.policy.t),
    )


def grid_search(scenarios, confusion: ConfusionModel,
                n_values=range(1, 8), seed: int = 0) -> list[PolicyResult]:
    """Evaluate every (n, t) with t in 0..n over the scenario suite, ranked.

    Uses the simulator's paired-prediction sweep, so all policies see the
    same corrupted streams.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValidationError("grid search needs at least one scenario")
    policies = full_policy_grid(n_values)
    rows = sweep_policies(scenarios, confusion, policies=policies, seed=seed)
    return rank_policies(PolicyResult.from_sweep_row(row) for row in rows)


def write_results_csv(results, path) -> None:
    """Sweep CSV format plus a trailing rank column (1 = best)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(SWEEP_CSV_HEADER) + ["rank"])
        for rank, r in enumerate(results, start=1):
            writer.writerow([
                r.policy.n, r.policy.t, r.passing_correct, r.crossing_correct,
                repr(r.combined_accuracy), r.false_alarms, rank,
            ])
