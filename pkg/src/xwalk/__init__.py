"""xwalk: a sliding-window trigger engine for automatic crosswalk activation.

Per-second frame classifications (street / pedestrian / biker) stream into
a window of the n most recent frames; when at least t of them are positive
the engine fires an edge-triggered activation event. The package also
ships a scenario simulator, an episode-level evaluator, a policy tuner,
and a CLI runner for live use.
"""
from .classify import (
    ClassScores,
    ConfusionBackend,
    ConfusionModel,
    ModelBackend,
    ReplayBackend,
    classify_frame,
    decide,
)
from .config import RunnerConfig, load_config
from .engine import (
    CLASS_ORDER,
    FrameClass,
    Observation,
    TriggerEngine,
    TriggerEvent,
    WindowPolicy,
)
from .errors import (
    BackendLoadError,
    ClassificationError,
    ConfigError,
    DecodeError,
    EndOfStream,
    OrderingError,
    PolicyError,
    ValidationError,
    XwalkError,
)
from .evaluate import (
    AggregateReport,
    Episode,
    EpisodeKind,
    EpisodeOutcome,
    LocationReport,
    aggregate,
    display_accuracy,
    display_rate,
    round_half_up,
    score_episodes,
)
from .preprocess import PreprocessSpec, load_image, preprocess
from .runner import EventRecord, RunResult, parse_event_log, run_live
from .simulate import (
    EpisodeSpec,
    Scenario,
    SimConfig,
    full_policy_grid,
    generate_scenario,
    render_true_stream,
    run_scenario,
    sweep_policies,
)
from .tune import PolicyResult, grid_search, rank_policies

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
