"""Config parsing: defaults, diagnostics, and kind-ambiguity rules."""
import numpy as np
import pytest

from xwalk import ConfigError, WindowPolicy, load_config
from xwalk.config import parse_config_text


def write(tmp_path, text):
    path = tmp_path / "runner.conf"
    path.write_text(text)
    return path


def test_minimal_confusion_config_gets_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "classifier.kind = confusion\n"))
    assert cfg.policy == WindowPolicy(5, 3)
    assert cfg.cadence_seconds == 1.0
    assert cfg.classifier_kind == "confusion"
    assert np.array_equal(cfg.confusion.matrix, np.eye(3))


def test_empty_config_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "# nothing but comments\n"))
    assert cfg.policy == WindowPolicy(5, 3)
    assert cfg.classifier_kind == "confusion"


def test_zero_cadence_rejected(tmp_path):
    with pytest.raises(ConfigError, match="cadence"):
        load_config(write(tmp_path, "cadence_seconds = 0\n"))


def test_model_and_confusion_is_ambiguous(tmp_path):
    text = (
        "classifier.model_path = model.pt\n"
        "classifier.confusion_diagonal = 0.9\n"
    )
    with pytest.raises(ConfigError, match="both model and confusion"):
        load_config(write(tmp_path, text))


def test_unknown_key_reports_line(tmp_path):
    with pytest.raises(ConfigError, match="line 2.*windowsill"):
        load_config(write(tmp_path, "seed = 1\nwindowsill = 4\n"))


def test_duplicate_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="duplicate"):
        load_config(write(tmp_path, "seed = 1\nseed = 2\n"))


def test_missing_equals_reports_line(tmp_path):
    with pytest.raises(ConfigError, match="line 1"):
        load_config(write(tmp_path, "just some words\n"))


def test_window_policy_validated(tmp_path):
    with pytest.raises(ConfigError, match="window"):
        load_config(write(tmp_path, "window.n = 3\nwindow.t = 4\n"))


def test_confusion_matrix_literal(tmp_path):
    text = "classifier.confusion = 0.9,0.05,0.05; 0.1,0.8,0.1; 0,0,1\n"
    cfg = load_config(write(tmp_path, text))
    assert cfg.confusion.matrix[1][1] == 0.8


def test_bad_matrix_literal_reports_line(tmp_path):
    with pytest.raises(ConfigError, match="line 1"):
        load_config(write(tmp_path, "classifier.confusion = 0.9,0.1\n"))


def test_non_stochastic_matrix_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "classifier.confusion = 1,1,1; 0,1,0; 0,0,1\n"))


def test_diagonal_shorthand(tmp_path):
    cfg = load_config(write(tmp_path, "classifier.confusion_diagonal = 0.9567\n"))
    assert cfg.confusion.matrix[0][0] == pytest.approx(0.9567)
    assert cfg.confusion.matrix[0][1] == pytest.approx(0.02165)


def test_webhook_must_be_http_url(tmp_path):
    with pytest.raises(ConfigError, match="webhook"):
        load_config(write(tmp_path, "sinks.webhook = not-a-url\n"))
    cfg = load_config(write(tmp_path, "sinks.webhook = http://127.0.0.1:9/hook\n"))
    assert cfg.webhook == "http://127.0.0.1:9/hook"


def test_replay_kind_requires_no_model_keys(tmp_path):
    text = "classifier.kind = replay\nclassifier.model_path = m.pt\n"
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, text))


def test_model_kind_requires_path(tmp_path):
    with pytest.raises(ConfigError, match="model_path"):
        load_config(write(tmp_path, "classifier.kind = model\n"))


def test_kind_inferred_from_manifest(tmp_path):
    cfg = load_config(write(tmp_path, "classifier.manifest = frames/\n"))
    assert cfg.classifier_kind == "replay"


def test_sim_keys(tmp_path):
    text = (
        "sim.passing = 10\n"
        "sim.crossing = 20\n"
        "sim.passing_dwell = 2:2\n"
        "sim.crossing_dwell = 5:9\n"
        "sim.pedestrian_fraction = 0.5\n"
        "sim.n_values = 1,2,3\n"
    )
    cfg = load_config(write(tmp_path, text))
    assert (cfg.sim_passing, cfg.sim_crossing) == (10, 20)
    assert cfg.sim_passing_dwell == (2, 2)
    assert cfg.sim_crossing_dwell == (5, 9)
    assert cfg.sim_n_values == (1, 2, 3)


def test_bad_n_values_rejected(tmp_path):
    with pytest.raises(ConfigError, match="n_values"):
        load_config(write(tmp_path, "sim.n_values = 0,1\n"))


def test_unreadable_path_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.conf")


def test_parse_text_source_in_messages():
    with pytest.raises(ConfigError, match="custom.conf"):
        parse_config_text("bogus = 1\n", source="custom.conf")
