"""End-to-end pipeline on a replayed label stream.

Builds a replay manifest (a pedestrian walking past, then one waiting to
cross), runs the live loop at a fast cadence, then re-reads the JSON-lines
log and shows that offline scoring reproduces the online result.

Equivalent CLI:
    xwalk run --config runner.conf
    xwalk evaluate --log events.jsonl --episodes episodes.txt

Run:  python3 demos/live_replay.py
"""
import tempfile
from pathlib import Path

from xwalk import LocationReport, score_episodes
from xwalk.config import parse_config_text
from xwalk.evaluate import Episode, EpisodeKind, FrameClass, format_location_table
from xwalk.runner import parse_event_log, run_live, trigger_timestamps

workdir = Path(tempfile.mkdtemp(prefix="xwalk_demo_"))
manifest = workdir / "manifest.txt"
log_path = workdir / "events.jsonl"

# 0-3: empty street; 4-5: someone passes; 6-11: empty; 12-21: someone waits.
labels = (["street"] * 4 + ["pedestrian"] * 2 + ["street"] * 6
          + ["pedestrian"] * 10 + ["street"] * 4)
manifest.write_text("".join(f"f{i:03d} {c}\n" for i, c in enumerate(labels)))

config = parse_config_text(f"""
classifier.kind = replay
classifier.manifest = {manifest}
window.n = 5
window.t = 3
cadence_seconds = 0.01
output.log = {log_path}
""")

result = run_live(config)
print(f"replayed {len(result.records)} frames, {len(result.events)} trigger(s)")
for event in result.events:
    print(f"  trigger at t={event.timestamp:.3f} dominant={event.dominant_class.value} "
          f"count={event.positive_count}")

stamps = [r.timestamp for r in result.records]
episodes = [
    Episode(EpisodeKind.PASSING, FrameClass.PEDESTRIAN, stamps[4], stamps[5]),
    Episode(EpisodeKind.CROSSING, FrameClass.PEDESTRIAN, stamps[12], stamps[21]),
]

offline = parse_event_log(log_path)
assert [r for r in result.records] == offline, "log round-trip must be exact"
outcomes, false_alarms = score_episodes(trigger_timestamps(offline), episodes)
report = LocationReport.from_outcomes(outcomes, false_alarms,
                                      predictions_made=len(offline),
                                      label="replayed session")
print()
print(format_location_table(report))
print(f"\nartifacts in {workdir}")
