"""Simulator: generation, rendering, hand traces, and the clean-stream closed form."""
import numpy as np
import pytest

from xwalk import (
    ConfusionModel,
    EpisodeKind,
    EpisodeSpec,
    FrameClass,
    Scenario,
    SimConfig,
    ValidationError,
    WindowPolicy,
    full_policy_grid,
    generate_scenario,
    render_true_stream,
    run_scenario,
    sweep_policies,
)
from xwalk.simulate import (
    corrupt_stream,
    read_episode_file,
    read_scenario,
    write_scenario,
    write_sweep_csv,
)

S, P, B = FrameClass.STREET, FrameClass.PEDESTRIAN, FrameClass.BIKER
PASSING, CROSSING = EpisodeKind.PASSING, EpisodeKind.CROSSING
IDENTITY = ConfusionModel.identity()


def spec(kind, start, dur, traveler=P):
    return EpisodeSpec(kind=kind, traveler=traveler, start=start, visible_duration=dur)


class TestScenarioTypes:
    def test_duration_must_be_positive(self):
        with pytest.raises(ValidationError):
            spec(PASSING, 0, 0)

    def test_overlap_rejected(self):
        with pytest.raises(ValidationError):
            Scenario(total_seconds=20, episodes=(
                spec(PASSING, 0, 5), spec(CROSSING, 4, 3),
            ))

    def test_episode_must_fit(self):
        with pytest.raises(ValidationError):
            Scenario(total_seconds=5, episodes=(spec(PASSING, 3, 4),))

    def test_street_traveler_rejected(self):
        with pytest.raises(ValidationError):
            spec(PASSING, 0, 2, traveler=S)


class TestGenerateScenario:
    def test_episode_counts(self):
        scenario = generate_scenario(SimConfig(seed=0), 50, 50)
        kinds = [ep.kind for ep in scenario.episodes]
        assert len(kinds) == 100
        assert kinds.count(PASSING) == 50
        assert kinds.count(CROSSING) == 50

    def test_empty_scenario_is_all_street(self):
        scenario = generate_scenario(SimConfig(seed=1), 0, 0)
        assert scenario.episodes == ()
        assert set(render_true_stream(scenario)) == {S}

    def test_same_seed_same_scenario(self):
        a = generate_scenario(SimConfig(seed=42), 10, 10)
        b = generate_scenario(SimConfig(seed=42), 10, 10)
        assert a == b

    def test_different_seed_differs(self):
        a = generate_scenario(SimConfig(seed=1), 10, 10)
        b = generate_scenario(SimConfig(seed=2), 10, 10)
        assert a != b

    def test_gaps_at_least_drain(self):
        config = SimConfig(seed=3)
        drain = config.drain_seconds
        scenario = generate_scenario(config, 20, 20)
        previous_end = -1
        for ep in scenario.episodes:
            assert ep.start - (previous_end + 1) >= drain
            previous_end = ep.end

    def test_dwells_within_bounds(self):
        config = SimConfig(seed=4, passing_dwell=(2, 2), crossing_dwell=(5, 9))
        scenario = generate_scenario(config, 30, 30)
        for ep in scenario.episodes:
            if ep.kind is PASSING:
                assert ep.visible_duration == 2
            else:
                assert 5 <= ep.visible_duration <= 9

    def test_negative_counts_rejected(self):
        with pytest.raises(ValidationError):
            generate_scenario(SimConfig(seed=0), -1, 5)


class TestRenderTrueStream:
    def test_single_crossing(self):
        scenario = Scenario(total_seconds=7,
                            episodes=(spec(CROSSING, 2, 3),))
        assert render_true_stream(scenario) == [S, S, P, P, P, S, S]

    def test_empty_scenario(self):
        scenario = Scenario(total_seconds=4, episodes=())
        assert render_true_stream(scenario) == [S, S, S, S]

    def test_gapped_episodes_never_share_a_second(self):
        scenario = Scenario(total_seconds=12, episodes=(
            spec(PASSING, 1, 2, traveler=B), spec(CROSSING, 5, 3),
        ))
        stream = render_true_stream(scenario)
        assert stream == [S, B, B, S, S, P, P, P, S, S, S, S]


class TestRunScenario:
    def test_clean_crossing_triggers_on_third_visible_second(self):
        scenario = Scenario(total_seconds=30, episodes=(spec(CROSSING, 10, 10),))
        result = run_scenario(scenario, WindowPolicy(5, 3), IDENTITY, seed=0)
        assert [e.timestamp for e in result.trigger_log] == [12.0]
        assert result.outcomes[0].correct
        assert result.false_alarms == 0

    def test_clean_short_passing_never_triggers(self):
        scenario = Scenario(total_seconds=20, episodes=(spec(PASSING, 8, 2),))
        result = run_scenario(scenario, WindowPolicy(5, 3), IDENTITY, seed=0)
        assert result.trigger_log == ()
        assert result.outcomes[0].correct

    def test_unconditional_policy(self):
        scenario = Scenario(total_seconds=10, episodes=(
            spec(PASSING, 2, 1), spec(CROSSING, 6, 2),
        ))
        result = run_scenario(scenario, WindowPolicy(1, 0), IDENTITY, seed=0)
        assert len(result.trigger_log) == 10
        by_kind = {o.episode.kind: o.correct for o in result.outcomes}
        assert by_kind[PASSING] is False
        assert by_kind[CROSSING] is True

    def test_predictions_made_equals_total_seconds(self):
        scenario = generate_scenario(SimConfig(seed=5), 5, 5)
        result = run_scenario(scenario, WindowPolicy(5, 3), IDENTITY, seed=0)
        assert result.predictions_made == scenario.total_seconds

    def test_deterministic_log(self):
        scenario = generate_scenario(SimConfig(seed=6), 10, 10)
        noisy = ConfusionModel.with_diagonal(0.9)
        a = run_scenario(scenario, WindowPolicy(4, 2), noisy, seed=9)
        b = run_scenario(scenario, WindowPolicy(4, 2), noisy, seed=9)
        assert a == b


def closed_form_row(scenario, policy):
    """Independent oracle for identity confusion.

    With a clean stream, an episode of dwell d triggers inside itself
    exactly when t >= 1 and d >= t; with t = 0 every second fires.
    """
    n, t = policy.n, policy.t
    passing = [ep for ep in scenario.episodes if ep.kind is PASSING]
    crossing = [ep for ep in scenario.episodes if ep.kind is CROSSING]
    if t == 0:
        visible = sum(ep.visible_duration for ep in scenario.episodes)
        return (0, len(passing), len(crossing), len(crossing),
                scenario.total_seconds - visible)
    pc = sum(1 for ep in passing if ep.visible_duration < t)
    cc = sum(1 for ep in crossing if ep.visible_duration >= t)
    return (pc, len(passing), cc, len(crossing), 0)


class TestSweep:
    def test_full_grid_has_35_rows(self):
        assert len(full_policy_grid(range(1, 8))) == 35

    def test_clean_sweep_matches_closed_form(self):
        config = SimConfig(seed=7, passing_dwell=(2, 2), crossing_dwell=(10, 10))
        scenario = generate_scenario(config, 50, 50)
        rows = sweep_policies([scenario], IDENTITY, seed=7)
        assert len(rows) == 35
        for row in rows:
            pc, pt, cc, ct, fa = closed_form_row(scenario, WindowPolicy(row.n, row.t))
            assert (row.passing_correct, row.passing_total) == (pc, pt)
            assert (row.crossing_correct, row.crossing_total) == (cc, ct)
            assert row.false_alarms == fa
            assert row.accuracy == (pc + cc) / 100
            if row.t == 0:
                assert (row.passing_correct, row.crossing_correct) == (0, 50)
                assert row.accuracy == 0.5
            elif row.t <= 2:
                assert (row.passing_correct, row.crossing_correct) == (0, 50)
            else:
                assert (row.passing_correct, row.crossing_correct) == (50, 50)

    def test_sweep_deterministic(self):
        scenario = generate_scenario(SimConfig(seed=8), 10, 10)
        noisy = ConfusionModel.with_diagonal(0.9567)
        assert (sweep_policies([scenario], noisy, seed=3)
                == sweep_policies([scenario], noisy, seed=3))

    def test_empty_suite_rejected(self):
        with pytest.raises(ValidationError):
            sweep_policies([], IDENTITY)

    def test_exceedance_monotonicity_on_shared_stream(self):
        # On one corrupted stream, the set of seconds with count >= t can
        # only shrink as t grows; checked against a windowed recount.
        scenario = generate_scenario(SimConfig(seed=9), 20, 20)
        noisy = ConfusionModel.with_diagonal(0.9567)
        rng = np.random.default_rng(11)
        pred = corrupt_stream(render_true_stream(scenario), noisy, rng)
        positives = np.array([c.positive for c in pred], dtype=int)
        for n in (1, 4, 7):
            window_counts = np.convolve(positives, np.ones(n, dtype=int))[:len(positives)]
            previous = None
            for t in range(n + 1):
                exceed = int((window_counts >= t).sum())
                if previous is not None:
                    assert exceed <= previous
                previous = exceed

    def test_csv_output(self, tmp_path):
        scenario = generate_scenario(SimConfig(seed=10), 3, 3)
        rows = sweep_policies([scenario], IDENTITY, seed=10)
        out = tmp_path / "sweep.csv"
        write_sweep_csv(rows, out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "n,t,passing_correct,crossing_correct,accuracy,false_alarms"
        assert len(lines) == 36


class TestScenarioFiles:
    def test_round_trip(self, tmp_path):
        scenario = generate_scenario(SimConfig(seed=12), 4, 4)
        path = tmp_path / "scenario.txt"
        write_scenario(scenario, path)
        assert read_scenario(path) == scenario

    def test_episode_file_view(self, tmp_path):
        path = tmp_path / "episodes.txt"
        path.write_text("crossing pedestrian 5 8\npassing biker 20 2\n")
        episodes = read_episode_file(path)
        assert episodes[0].kind is CROSSING
        assert (episodes[0].start, episodes[0].end) == (5.0, 12.0)
        assert episodes[1].traveler is B

    def test_bad_kind_rejected(self, tmp_path):
        path = tmp_path / "scenario.txt"
        path.write_text("loitering pedestrian 5 8\n")
        with pytest.raises(ValidationError, match="loitering"):
            read_scenario(path)
